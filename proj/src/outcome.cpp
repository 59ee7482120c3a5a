#include "empg/outcome.hpp"

#include <string>

namespace empg {

GroupAdvantage group_advantage(const Batch& batch, std::uint64_t group_id, double epsilon) {
  const auto it = batch.groups.find(group_id);
  if (it == batch.groups.end()) throw Error(ErrorCode::IndexOutOfRange, "unknown group " + std::to_string(group_id));
  GroupAdvantage out;
  out.group_id = group_id;
  out.members = it->second;
  out.rewards.resize(static_cast<Eigen::Index>(out.members.size()));
  for (std::size_t j = 0; j < out.members.size(); ++j)
    out.rewards[static_cast<Eigen::Index>(j)] = trajectory_return(batch.trajectories.at(out.members[j]));
  out.advantages = grpo_advantages(out.rewards, epsilon);
  out.mean = out.rewards.mean();
  out.std = std::sqrt((out.rewards.array() - out.mean).square().mean());
  return out;
}

FilterResult filter_groups(const Batch& batch) {
  FilterResult out;
  for (const auto& [gid, members] : batch.groups) {
    bool varied = false;
    for (std::size_t idx : members)
      if (trajectory_return(batch.trajectories.at(idx)) != trajectory_return(batch.trajectories.at(members.front())))
        varied = true;
    if (varied)
      out.surviving.push_back(gid);
    else
      ++out.dropped;
  }
  return out;
}

}  // namespace empg
