#include "empg/entropy.hpp"
#include "empg/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace empg;

namespace {

Vector vec(std::vector<double> v) { return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("step_entropy is the mean of token entropies") {
  CHECK(step_entropy(std::vector<double>{0.2, 0.4}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(step_entropy(std::vector<double>{0.7}) == 0.7);
  CHECK(step_entropy(std::vector<double>{std::log(2.0), std::log(4.0), 0.0}) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK_THROWS_AS(step_entropy(std::vector<double>{}), Error);
}

TEST_CASE("minmax_normalize") {
  CHECK(minmax_normalize(vec({0.5, 0.5, 0.5}), 1e-8) == Vector::Zero(3));
  const Vector n = minmax_normalize(vec({0, 1, 2}), 1e-8);
  CHECK(n[0] == 0.0);
  CHECK(std::abs(n[1] - 0.4999999975) < 1e-15);
  CHECK(std::abs(n[2] - 0.9999999950) < 1e-15);
  CHECK(minmax_normalize(vec({3.7}), 1e-8) == Vector::Zero(1));
  CHECK_THROWS_AS(minmax_normalize(Vector(0), 1e-8), Error);
}

TEST_CASE("minmax_normalize: affine invariance, order preservation, range") {
  CounterRng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 40;
    Vector h(n);
    for (int i = 0; i < n; ++i) h[i] = 3.0 * uniform01(rng);
    const double a = 0.5 + 4.0 * uniform01(rng), b = uniform01(rng) - 0.5;
    const Vector base = minmax_normalize(h, 1e-8);
    const Vector moved = minmax_normalize(Vector((a * h.array() + b).matrix()), 1e-8);
    // Exact up to epsilon, which does not scale with the data.
    const double range = h.maxCoeff() - h.minCoeff();
    const double tol = range > 0 ? 2e-8 / std::min(range, a * range) + 1e-14 : 1e-14;
    CHECK((base - moved).cwiseAbs().maxCoeff() <= tol);
    CHECK(base.minCoeff() >= 0.0);
    CHECK(base.maxCoeff() < 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (h[i] < h[j]) CHECK(base[i] <= base[j]);
  }
}

TEST_CASE("build_entropy_ledger pools all listed steps in order") {
  CounterRng rng(2);
  const auto policy = random_policy(6, {3, 3}, 1.0, rng);
  const Batch batch = synthetic_batch(policy, {}, rng);
  std::vector<std::size_t> all(batch.trajectories.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto ledger = build_entropy_ledger(batch, all, 1e-8);
  REQUIRE(ledger.steps.size() == batch.step_count());
  std::size_t k = 0;
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i)
    for (std::size_t t = 0; t < batch.trajectories[i].steps.size(); ++t, ++k) {
      CHECK(ledger.steps[k].traj == i);
      CHECK(ledger.steps[k].step == t);
      CHECK(ledger.raw[static_cast<Eigen::Index>(k)] ==
            step_entropy(std::span<const double>(batch.trajectories[i].steps[t].token_entropies)));
    }
  CHECK(ledger.batch_min <= ledger.raw.minCoeff());
  CHECK(ledger.batch_max >= ledger.raw.maxCoeff());
  CHECK(ledger.normalized.minCoeff() >= 0.0);
  CHECK(ledger.normalized.maxCoeff() < 1.0);
  CHECK_THROWS_AS(build_entropy_ledger(batch, std::vector<std::size_t>{}, 1e-8), Error);
}
