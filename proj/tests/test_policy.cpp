#include "empg/policy.hpp"
#include "empg/serialization.hpp"
#include "empg/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace empg;

namespace {

SoftmaxPolicy single_state(std::initializer_list<double> logits) {
  auto p = SoftmaxPolicy::tabular(1, logits.size());
  Eigen::Index i = 0;
  for (double z : logits) p.logits()(0, i++) = z;
  return p;
}

constexpr StateId s0{0};

}  // namespace

TEST_CASE("action_distribution") {
  auto half = single_state({0, 0}).action_distribution(s0);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

  auto skewed = single_state({std::log(3.0), 0}).action_distribution(s0);
  CHECK(std::abs(skewed[0] - 0.75) < 1e-15);
  CHECK(std::abs(skewed[1] - 0.25) < 1e-15);

  auto four = single_state({0, 0, 0, 0}).action_distribution(s0);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(four[i] - 0.25) < 1e-15);

  CHECK_THROWS_AS(single_state({0, 0}).action_distribution(StateId{1}), Error);
}

TEST_CASE("score_logits is delta minus pi") {
  const auto sym = single_state({0, 0}).score_logits(s0, 0);
  CHECK(std::abs(sym[0] - 0.5) < 1e-15);
  CHECK(std::abs(sym[1] + 0.5) < 1e-15);

  const auto skew = single_state({std::log(3.0), 0}).score_logits(s0, 1);
  CHECK(std::abs(skew[0] + 0.75) < 1e-15);
  CHECK(std::abs(skew[1] - 0.75) < 1e-15);

  CounterRng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_policy(1, {6}, 2.0, rng);
    CHECK(std::abs(p.score_logits(s0, static_cast<std::uint32_t>(i % 6)).sum()) < 1e-14);
  }
  CHECK_THROWS_AS(single_state({0, 0}).score_logits(s0, 2), Error);
}

TEST_CASE("policy_entropy") {
  CHECK(single_state({0, 0}).policy_entropy(s0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(single_state({0, 0, 0, 0}).policy_entropy(s0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  // -(0.75 ln 0.75 + 0.25 ln 0.25)
  CHECK(single_state({std::log(3.0), 0}).policy_entropy(s0) == doctest::Approx(0.5623351446188083).epsilon(1e-13));
}

TEST_CASE("log_prob") {
  CHECK(single_state({0, 0}).log_prob(s0, {1}) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  SoftmaxPolicy three(1, {2, 2, 2});
  CHECK(three.log_prob(s0, {0, 1, 1}) == doctest::Approx(3 * std::log(0.5)).epsilon(1e-15));
  CHECK(single_state({std::log(3.0), 0}).log_prob(s0, {0}) == doctest::Approx(std::log(0.75)).epsilon(1e-14));
  CHECK_THROWS_AS(three.log_prob(s0, {0, 1}), Error);
  CHECK_THROWS_AS(three.log_prob(s0, {0, 1, 2}), Error);
}

TEST_CASE("score matches central finite differences of log_prob") {
  CounterRng rng(2024);
  const double h = 1e-5;
  double worst = 0.0;
  for (int draw = 0; draw < 120; ++draw) {
    auto policy = random_policy(4, {3, 5}, 1.5, rng);
    const StateId s{static_cast<std::uint32_t>(draw % 4)};
    const auto sampled = policy.sample_step(s, rng);
    LogitTables analytic = zeros_like(policy.tables());
    policy.accumulate_score(s, sampled.action, 1.0, analytic);
    for (std::size_t p = 0; p < policy.positions(); ++p)
      for (Eigen::Index a = 0; a < policy.logits(p).cols(); ++a) {
        auto plus = policy, minus = policy;
        plus.logits(p)(index_of(s), a) += h;
        minus.logits(p)(index_of(s), a) -= h;
        const double fd = (plus.log_prob(s, sampled.action) - minus.log_prob(s, sampled.action)) / (2 * h);
        worst = std::max(worst, std::abs(fd - analytic[p](index_of(s), a)));
      }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("entropy bounds and simplex") {
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 9);
    const auto p = random_policy(1, {n}, 0.5 + (i % 5), rng);
    const auto pi = p.action_distribution(s0);
    CHECK(std::abs(pi.sum() - 1.0) < 1e-12);
    CHECK(pi.minCoeff() > 0);
    const double h = p.policy_entropy(s0);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
  }
  CHECK(single_state({50, 0}).policy_entropy(s0) < 1e-18);
}

TEST_CASE("sample_step") {
  CounterRng rng(1);
  SUBCASE("degenerate distribution") {
    SoftmaxPolicy p(1, {2, 3});
    p.logits(0)(0, 1) = 50;
    p.logits(1)(0, 2) = 50;
    for (int i = 0; i < 100; ++i) {
      const auto s = p.sample_step(s0, rng);
      CHECK(s.action == CompositeAction{1, 2});
      CHECK(s.token_entropies[0] < 1e-18);
      CHECK(s.token_entropies[1] < 1e-18);
      CHECK(s.log_prob <= 0.0);
    }
  }
  SUBCASE("determinism") {
    const auto p = random_policy(3, {4, 4}, 1.0, rng);
    CounterRng a(99), b(99);
    for (int i = 0; i < 20; ++i) CHECK(p.sample_step(StateId{2}, a).action == p.sample_step(StateId{2}, b).action);
  }
  SUBCASE("uniform frequencies") {
    const auto p = SoftmaxPolicy::tabular(1, 2);
    int zeros = 0;
    for (int i = 0; i < 10000; ++i) zeros += p.sample_step(s0, rng).action[0] == 0;
    CHECK(std::abs(zeros / 10000.0 - 0.5) < 0.02);
  }
  SUBCASE("records positional entropies and the joint log-probability") {
    const auto p = random_policy(2, {3, 4}, 1.0, rng);
    const auto s = p.sample_step(StateId{1}, rng);
    CHECK(s.token_entropies == p.token_entropies(StateId{1}));
    CHECK(s.log_prob == p.log_prob(StateId{1}, s.action));
  }
}

TEST_CASE("kl_to") {
  const auto a = single_state({0, 0});
  const auto b = single_state({std::log(3.0), 0});
  CHECK(a.kl_to(a, s0) == 0.0);
  CHECK(a.kl_to(b, s0) == doctest::Approx(0.14384103622589042).epsilon(1e-12));
  CHECK(b.kl_to(a, s0) == doctest::Approx(0.13081203594113697).epsilon(1e-12));
}

TEST_CASE("checkpoint round-trip") {
  CounterRng rng(77);
  const auto policy = random_policy(9, {2, 5}, 3.0, rng);
  const auto text = encode_policy(policy);
  const auto back = decode_policy(text);
  CHECK(back == policy);
  CHECK(encode_policy(back) == text);
  CHECK_THROWS_AS(decode_policy("{\"record\":\"logits\",\"state\":0,\"position\":0,\"logits\":[1]}"), Error);
}
