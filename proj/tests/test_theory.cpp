#include "empg/entropy.hpp"
#include "empg/modulation.hpp"
#include "empg/outcome.hpp"
#include "empg/synthetic.hpp"
#include "empg/theory.hpp"

#include <doctest.h>

#include <cmath>

using namespace empg;
using namespace empg::theory;

namespace {

// Oracle: build grad_z log pi_k = e_k - pi explicitly and take its squared norm.
double explicit_norm_sq(const Vector& pi, Eigen::Index k) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    const double d = (i == k ? 1.0 : 0.0) - pi[i];
    s += d * d;
  }
  return s;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<AdvantageRecord> pipeline(const Batch& batch, const ModulationParams& params, Ablation ablation) {
  std::vector<double> a_outcome(batch.trajectories.size());
  std::vector<std::size_t> all;
  for (const auto& [gid, members] : batch.groups) {
    const auto g = group_advantage(batch, gid, params.epsilon);
    for (std::size_t j = 0; j < members.size(); ++j) a_outcome[members[j]] = g.advantages[static_cast<Eigen::Index>(j)];
  }
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) all.push_back(i);
  auto records = modulate(build_entropy_ledger(batch, all, params.epsilon), a_outcome, params, ablation);
  final_normalize(records);
  return records;
}

}  // namespace

TEST_CASE("per_action_norm_sq") {
  CHECK(per_action_norm_sq(vec({0.5, 0.5}), 0) == doctest::Approx(explicit_norm_sq(vec({0.5, 0.5}), 0)));
  CHECK(per_action_norm_sq(vec({0.5, 0.5}), 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(per_action_norm_sq(vec({0, 1, 0}), 1) == 0.0);
  CHECK(per_action_norm_sq(vec({0, 1, 0}), 2) == doctest::Approx(explicit_norm_sq(vec({0, 1, 0}), 2)));
  CHECK(per_action_norm_sq(vec({0, 1, 0}), 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(per_action_norm_sq(vec({0.5, 0.5}), 2), Error);
}

TEST_CASE("expected_norm_sq") {
  CHECK(expected_norm_sq(vec({0.5, 0.5})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(expected_norm_sq(vec({0.25, 0.25, 0.25, 0.25})) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(expected_norm_sq(vec({1, 0})) == 0.0);

  // Oracle: enumerate actions and weight the explicit norms by pi.
  const Vector pi = vec({0.7, 0.2, 0.1});
  double enumerated = 0.0;
  for (Eigen::Index k = 0; k < 3; ++k) enumerated += pi[k] * explicit_norm_sq(pi, k);
  CHECK(std::abs(enumerated - 0.46) < 1e-15);
  CHECK(std::abs(expected_norm_sq(pi) - enumerated) < 1e-15);
}

TEST_CASE("renyi2") {
  for (int n : {2, 3, 8, 64}) CHECK(renyi2(Vector(Vector::Constant(n, 1.0 / n))) == doctest::Approx(std::log(n)).epsilon(1e-14));
  CHECK(renyi2(vec({0, 1})) == 0.0);
  CHECK(renyi2(vec({0.7, 0.2, 0.1})) == doctest::Approx(-std::log(0.54)).epsilon(1e-14));
  CHECK(renyi2(vec({0.7, 0.2, 0.1})) == doctest::Approx(0.6161861394238172).epsilon(1e-12));
}

TEST_CASE("PolicyProbe rejects invalid distributions") {
  CHECK_THROWS_AS(PolicyProbe<double>(vec({1.0})), Error);
  CHECK_THROWS_AS(PolicyProbe<double>(vec({1.0, 0.0})), Error);
  CHECK_THROWS_AS(PolicyProbe<double>(vec({0.6, 0.6})), Error);
  CHECK_NOTHROW(PolicyProbe<double>(vec({0.6, 0.4})));
}

TEST_CASE("monte_carlo_norm_sq") {
  CounterRng rng(31);
  const auto one_hot = monte_carlo_norm_sq(vec({0, 0, 1}), 1000, rng);
  CHECK(one_hot.estimate == 0.0);
  CHECK(one_hot.std_error == 0.0);

  for (const Vector& pi : {vec({0.5, 0.5}), vec({0.7, 0.2, 0.1})}) {
    const auto mc = monte_carlo_norm_sq(pi, 100000, rng);
    CHECK(std::abs(mc.estimate - expected_norm_sq(pi)) <= 3 * mc.std_error + 1e-15);
  }
  CHECK_THROWS_AS(monte_carlo_norm_sq(vec({0.5, 0.5}), 0, rng), Error);
}

TEST_CASE("identities over random simplex draws") {
  CounterRng rng(1);
  double worst_renyi = 0.0, worst_enum = 0.0;
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 1000; ++i) {
    const Vector pi = random_simplex(2 + i % 63, rng);
    worst_renyi = std::max(worst_renyi, std::abs(expected_norm_sq(pi) - (1 - std::exp(-renyi2(pi)))));
    double enumerated = 0.0;
    for (Eigen::Index k = 0; k < pi.size(); ++k) enumerated += pi[k] * per_action_norm_sq(pi, k);
    worst_enum = std::max(worst_enum, std::abs(expected_norm_sq(pi) - enumerated));
    pairs.emplace_back(renyi2(pi), expected_norm_sq(pi));
  }
  CHECK(worst_renyi < 1e-12);
  CHECK(worst_enum < 1e-12);

  int violations = 0;
  for (std::size_t i = 0; i + 1 < pairs.size(); i += 2) {
    const auto& [ha, ea] = pairs[i];
    const auto& [hb, eb] = pairs[i + 1];
    if (ha > hb + 1e-12 && !(ea > eb)) ++violations;
    if (hb > ha + 1e-12 && !(eb > ea)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("gradient_assembly_identity") {
  CounterRng rng(404);
  const auto policy = random_policy(5, {3, 2}, 1.0, rng);

  SUBCASE("single-step trajectories, no bonus") {
    const Batch batch = synthetic_batch(policy, {2, 3, 1, 1, true}, rng);
    const ModulationParams params{1.0, 1.0, 0.0, 1e-8};
    CHECK(gradient_assembly_identity(pipeline(batch, params, Ablation::full), batch, policy, params, Ablation::full) < 1e-12);
  }
  SUBCASE("random multi-step batches, k=1, zeta=0.1") {
    const ModulationParams params{1.0, 1.0, 0.1, 1e-8};
    for (int trial = 0; trial < 20; ++trial) {
      const Batch batch = synthetic_batch(policy, {2, 4, 4, 4, true}, rng);
      CHECK(gradient_assembly_identity(pipeline(batch, params, Ablation::full), batch, policy, params, Ablation::full) < 1e-10);
    }
  }
  SUBCASE("k=0, zeta=0 reduces to the baseline gradient") {
    const ModulationParams params{0.0, 1.0, 0.0, 1e-8};
    const Batch batch = synthetic_batch(policy, {}, rng);
    const auto records = pipeline(batch, params, Ablation::full);
    for (const auto& r : records) CHECK(r.g == 1.0);
    CHECK(gradient_assembly_identity(records, batch, policy, params, Ablation::full) < 1e-12);
  }
  CHECK_THROWS_AS(gradient_assembly_identity({}, Batch{}, policy, ModulationParams{}, Ablation::full), Error);
}

TEST_CASE("run_verification passes and detects an injected fault") {
  VerifyOptions options;
  options.probes = 300;
  options.mc_samples = 20000;
  for (const auto& c : run_verification(options)) CHECK_MESSAGE(c.passed, c.name);

  options.injected_fault = 1e-6;
  bool any_failed = false;
  for (const auto& c : run_verification(options)) any_failed = any_failed || !c.passed;
  CHECK(any_failed);

  options.mc_samples = 0;
  CHECK_THROWS_AS(run_verification(options), Error);
}
