#include "empg/outcome.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace empg;

namespace {

Vector vec(std::vector<double> v) { return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

Batch batch_with_groups(const std::vector<std::vector<int>>& groups) {
  Batch b;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int r : groups[g]) {
      Trajectory t;
      t.group_id = g;
      t.terminal_reward = r;
      t.steps.push_back({StateId{0}, {0}, {0.1}, -0.5});
      b.trajectories.push_back(t);
    }
  rebuild_groups(b);
  return b;
}

}  // namespace

TEST_CASE("trajectory_return is the terminal reward regardless of length") {
  Trajectory t;
  t.terminal_reward = 1;
  for (int len = 1; len < 20; ++len) {
    t.steps.push_back({StateId{0}, {0}, {0.1}, -0.1});
    CHECK(trajectory_return(t) == 1);
  }
  t.terminal_reward = 0;
  CHECK(trajectory_return(t) == 0);
}

TEST_CASE("grpo_advantages") {
  const Vector a = grpo_advantages(vec({1, 0, 0, 1}), 1e-8);
  const double expected = 0.5 / (0.5 + 1e-8);
  CHECK(a[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(-expected).epsilon(1e-15));
  CHECK(a[3] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(grpo_advantages(vec({1, 1, 1}), 1e-8) == Vector::Zero(3));
  const Vector pair = grpo_advantages(vec({1, 0}), 1e-8);
  CHECK(pair[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(pair[1] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK_THROWS_AS(grpo_advantages(vec({1}), 1e-8), Error);
}

TEST_CASE("grpo_advantages: permutation symmetry and binary structure") {
  for (int m = 2; m <= 8; ++m)
    for (int p = 0; p <= m; ++p) {
      std::vector<double> r(m, 0.0);
      std::fill(r.begin(), r.begin() + p, 1.0);
      const Vector a = grpo_advantages(vec(r), 1e-8);
      CHECK(std::abs(a.mean()) < 1e-9);
      std::vector<double> rev(r.rbegin(), r.rend());
      const Vector b = grpo_advantages(vec(rev), 1e-8);
      for (int i = 0; i < m; ++i) CHECK(std::abs(b[i] - a[m - 1 - i]) < 1e-15);
      if (p > 0 && p < m) {
        for (int i = 0; i < p; ++i) CHECK(std::abs(a[i] - a[0]) < 1e-15);
        for (int i = p; i < m; ++i) CHECK(std::abs(a[i] - a[m - 1]) < 1e-15);
        CHECK(a[0] > 0.0);
        CHECK(a[m - 1] < 0.0);
      }
    }
}

TEST_CASE("filter_groups drops zero-variance groups") {
  auto r = filter_groups(batch_with_groups({{1, 1, 1, 1}, {1, 0, 1, 0}}));
  CHECK(r.surviving == std::vector<std::uint64_t>{1});
  CHECK(r.dropped == 1);

  r = filter_groups(batch_with_groups({{1, 1}, {0, 0, 0}}));
  CHECK(r.empty());
  CHECK(r.dropped == 2);

  r = filter_groups(batch_with_groups({{0, 0, 0, 1}}));
  CHECK(r.surviving.size() == 1);
}

TEST_CASE("group_advantage uses the population standard deviation") {
  const auto g = group_advantage(batch_with_groups({{1, 0, 0, 0}}), 0, 1e-8);
  CHECK(g.mean == 0.25);
  CHECK(g.std == doctest::Approx(std::sqrt(0.1875)).epsilon(1e-15));
}
