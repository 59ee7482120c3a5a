#include "empg/core_model.hpp"

#include <cmath>
#include <set>

namespace empg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::SingletonGroup: return "SingletonGroup";
    case ErrorCode::RewardOutOfRange: return "RewardOutOfRange";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::ActionOutOfRange: return "ActionOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyStep: return "EmptyStep";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::EntropyPipelineMissing: return "EntropyPipelineMissing";
    case ErrorCode::PipelineNotRun: return "PipelineNotRun";
    case ErrorCode::AllGroupsFiltered: return "AllGroupsFiltered";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::SteppedAfterDone: return "SteppedAfterDone";
    case ErrorCode::NotTerminal: return "NotTerminal";
    case ErrorCode::EnvFailure: return "EnvFailure";
    case ErrorCode::EmptyLedger: return "EmptyLedger";
    case ErrorCode::MismatchedGrids: return "MismatchedGrids";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IdentityViolated: return "IdentityViolated";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::baseline: return "baseline";
    case Ablation::scaling_only: return "scaling_only";
    case Ablation::bonus_only: return "bonus_only";
    case Ablation::full: return "full";
  }
  return "unknown";
}

Ablation parse_ablation(std::string_view text) {
  if (text == "baseline") return Ablation::baseline;
  if (text == "scaling_only") return Ablation::scaling_only;
  if (text == "bonus_only") return Ablation::bonus_only;
  if (text == "full") return Ablation::full;
  throw Error(ErrorCode::ConfigParse, "unknown ablation '" + std::string(text) + "'");
}

void ModulationParams::validate() const {
  if (!std::isfinite(k) || !std::isfinite(k_prime) || !std::isfinite(zeta) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidArgument, "modulation parameters must be finite");
  if (k < 0 || k_prime < 0 || zeta < 0)
    throw Error(ErrorCode::InvalidArgument, "k, k_prime and zeta must be non-negative");
  if (epsilon <= 0) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

std::size_t Batch::step_count() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.steps.size();
  return n;
}

std::optional<ValidationIssue> validate_batch(const Batch& batch, std::optional<std::size_t> horizon) {
  auto issue = [](ErrorCode code, std::string msg) { return ValidationIssue{code, std::move(msg)}; };

  if (batch.trajectories.empty()) return issue(ErrorCode::EmptyBatch, "batch has no trajectories");

  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
    const auto& traj = batch.trajectories[i];
    const auto where = "trajectory " + std::to_string(i);
    if (traj.terminal_reward != 0 && traj.terminal_reward != 1)
      return issue(ErrorCode::RewardOutOfRange,
                   where + " has terminal_reward " + std::to_string(traj.terminal_reward));
    if (traj.steps.empty()) return issue(ErrorCode::EmptyTrajectory, where + " has no steps");
    if (horizon && traj.steps.size() > *horizon)
      return issue(ErrorCode::HorizonExceeded, where + " is longer than the horizon");
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
      const auto& step = traj.steps[t];
      const auto at = where + " step " + std::to_string(t);
      if (step.action.empty()) return issue(ErrorCode::InvalidStep, at + " has an empty action");
      if (step.token_entropies.empty()) return issue(ErrorCode::EmptyStep, at + " has no token entropies");
      for (double h : step.token_entropies)
        if (!(h >= 0.0) || !std::isfinite(h))
          return issue(ErrorCode::InvalidStep, at + " has a negative or non-finite entropy");
      if (!(step.old_log_prob <= 0.0))
        return issue(ErrorCode::InvalidStep, at + " has old_log_prob > 0");
    }
  }

  std::set<std::size_t> seen;
  for (const auto& [gid, members] : batch.groups) {
    if (members.size() < 2)
      return issue(ErrorCode::SingletonGroup, "group " + std::to_string(gid) + " has fewer than 2 trajectories");
    for (std::size_t idx : members) {
      if (idx >= batch.trajectories.size())
        return issue(ErrorCode::IndexOutOfRange, "group " + std::to_string(gid) + " references a missing trajectory");
      if (!seen.insert(idx).second)
        return issue(ErrorCode::InvalidStep, "trajectory " + std::to_string(idx) + " appears in two groups");
      if (batch.trajectories[idx].group_id != gid)
        return issue(ErrorCode::InvalidStep, "trajectory " + std::to_string(idx) + " carries a different group_id");
    }
  }
  if (seen.size() != batch.trajectories.size())
    return issue(ErrorCode::InvalidStep, "some trajectories belong to no group");
  return std::nullopt;
}

void require_valid(const Batch& batch, std::optional<std::size_t> horizon) {
  if (auto issue = validate_batch(batch, horizon)) throw Error(issue->code, issue->message);
}

void rebuild_groups(Batch& batch) {
  batch.groups.clear();
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i)
    batch.groups[batch.trajectories[i].group_id].push_back(i);
}

}  // namespace empg
