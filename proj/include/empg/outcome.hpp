#ifndef EMPG_OUTCOME_HPP
#define EMPG_OUTCOME_HPP

#include "empg/core_model.hpp"
#include "empg/types.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace empg {

/// Undiscounted sparse return: all intermediate rewards are zero.
inline int trajectory_return(const Trajectory& trajectory) { return trajectory.terminal_reward; }

/// Group-relative Z-score, (r - mean) / (std + epsilon), population std.
template <typename Derived>
VectorX<typename Derived::Scalar> grpo_advantages(const Eigen::MatrixBase<Derived>& rewards,
                                                  typename Derived::Scalar epsilon) {
  using Scalar = typename Derived::Scalar;
  if (rewards.size() < 2) throw Error(ErrorCode::GroupTooSmall, "GRPO needs at least 2 rewards per group");
  const Scalar mean = rewards.mean();
  const Scalar var = (rewards.array() - mean).square().mean();
  return ((rewards.array() - mean) / (std::sqrt(var) + epsilon)).matrix();
}

struct GroupAdvantage {
  std::uint64_t group_id = 0;
  std::vector<std::size_t> members;
  Vector rewards;
  double mean = 0.0;
  double std = 0.0;
  Vector advantages;
};

GroupAdvantage group_advantage(const Batch& batch, std::uint64_t group_id, double epsilon);

struct FilterResult {
  std::vector<std::uint64_t> surviving;
  std::size_t dropped = 0;

  bool empty() const { return surviving.empty(); }
};

/// Drops every group whose rewards are all identical.
FilterResult filter_groups(const Batch& batch);

}  // namespace empg

#endif  // EMPG_OUTCOME_HPP
