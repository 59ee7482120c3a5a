#ifndef EMPG_CORE_MODEL_HPP
#define EMPG_CORE_MODEL_HPP

#include "empg/types.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace empg {

/// One sub-token choice per position of a composite action.
using CompositeAction = std::vector<std::uint32_t>;

/// One reason-act cycle as recorded at rollout time.
struct Step {
  StateId state_id{};
  CompositeAction action;
  std::vector<double> token_entropies;  // nats, one per sub-token
  double old_log_prob = 0.0;

  bool operator==(const Step&) const = default;
};

struct Trajectory {
  std::uint64_t task_id = 0;
  std::uint64_t group_id = 0;
  std::uint64_t seed = 0;
  std::vector<Step> steps;
  int terminal_reward = 0;

  bool operator==(const Trajectory&) const = default;
};

struct Batch {
  std::vector<Trajectory> trajectories;
  std::map<std::uint64_t, std::vector<std::size_t>> groups;

  std::size_t step_count() const;

  bool operator==(const Batch&) const = default;
};

/// Per-step advantage ledger entry.
struct AdvantageRecord {
  std::size_t traj_index = 0;
  std::size_t step_index = 0;
  double a_outcome = 0.0;
  double h_step = 0.0;
  double h_norm = 0.0;
  double g = 1.0;
  std::optional<double> f_next;  // absent exactly at a trajectory's last step
  double a_mod = 0.0;
  double a_final = 0.0;

  bool operator==(const AdvantageRecord&) const = default;
};

enum class Ablation { baseline, scaling_only, bonus_only, full };

std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view text);

constexpr bool uses_scaling(Ablation a) { return a == Ablation::scaling_only || a == Ablation::full; }
constexpr bool uses_bonus(Ablation a) { return a == Ablation::bonus_only || a == Ablation::full; }

enum class UpdateRule { vanilla, clipped };

struct ModulationParams {
  double k = 1.0;
  double k_prime = 1.0;
  double zeta = 0.05;
  double epsilon = 1e-8;

  void validate() const;

  bool operator==(const ModulationParams&) const = default;
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

/// Checks every Batch/Trajectory/Step invariant. Returns the first violation, if any.
std::optional<ValidationIssue> validate_batch(const Batch& batch,
                                              std::optional<std::size_t> horizon = std::nullopt);

/// Throwing variant of validate_batch.
void require_valid(const Batch& batch, std::optional<std::size_t> horizon = std::nullopt);

/// Builds the group map from each trajectory's group_id.
void rebuild_groups(Batch& batch);

}  // namespace empg

#endif  // EMPG_CORE_MODEL_HPP
