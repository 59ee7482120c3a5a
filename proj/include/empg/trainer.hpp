#ifndef EMPG_TRAINER_HPP
#define EMPG_TRAINER_HPP

#include "empg/config.hpp"
#include "empg/core_model.hpp"
#include "empg/entropy.hpp"
#include "empg/outcome.hpp"
#include "empg/policy.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace empg {

struct IterationMetrics {
  int iteration = 0;
  double success_rate = 0.0;
  double mean_step_entropy = 0.0;
  double mean_abs_a_final = 0.0;
  double kl_to_previous = 0.0;
  int dropped_groups = 0;
  bool skipped = false;
  double update_norm = 0.0;
  double wall_time = 0.0;  // seconds; kept out of metrics.jsonl

  bool operator==(const IterationMetrics&) const = default;
};

std::string encode_metrics(const IterationMetrics& m);
IterationMetrics decode_metrics(const std::string& line);

/// Initial policy for a config: zero logits plus optional seeded Gaussian noise.
SoftmaxPolicy initial_policy(const RunConfig& config);

/// Seed of the batch collected at a given iteration.
std::uint64_t batch_seed(const RunConfig& config, int iteration);

/// Rolls out `group_size` trajectories for each of `tasks_per_batch` tasks.
/// Task t runs on environment seed derive_seed({seed, t}); member m samples
/// with derive_seed({seed, t, m}), so the batch does not depend on rollout order.
Batch collect_batch(const SoftmaxPolicy& policy, const RunConfig& config, std::uint64_t seed);

/// Runs one episode with the given environment and sampling seeds.
Trajectory rollout(const SoftmaxPolicy& policy, const EnvSpec& env, std::uint64_t env_seed, std::uint64_t sample_seed);

struct PipelineResult {
  std::vector<AdvantageRecord> records;
  std::size_t dropped_groups = 0;
};

/// returns -> group filter -> GRPO -> step entropies -> min-max -> g -> f
/// -> A_mod -> zero-mean. Throws AllGroupsFiltered when nothing survives.
PipelineResult run_advantage_pipeline(const Batch& batch, const RunConfig& config);

struct UpdateResult {
  SoftmaxPolicy policy;
  double update_norm = 0.0;
};

/// Logit-space ascent direction sum_{i,t} w_t grad log pi(a_t | s_t), where
/// w_t is a_final (vanilla) or the clipped-surrogate weight.
LogitTables policy_gradient(const SoftmaxPolicy& policy, const std::vector<AdvantageRecord>& records,
                            const Batch& batch, const RunConfig& config);

UpdateResult update_policy(const SoftmaxPolicy& policy, const std::vector<AdvantageRecord>& records,
                           const Batch& batch, const RunConfig& config, double learning_rate);

/// Mean over distinct visited states of KL(old || new).
double kl_to_previous(const SoftmaxPolicy& old_policy, const SoftmaxPolicy& new_policy,
                      std::span<const StateId> visited);

std::vector<StateId> visited_states(const Batch& batch);

struct IterationRecord {
  const Batch& batch;
  const std::vector<AdvantageRecord>& records;
  const IterationMetrics& metrics;
  const SoftmaxPolicy& policy_after;
};

struct TrainResult {
  std::vector<IterationMetrics> metrics;
  SoftmaxPolicy policy;
};

/// The training loop, in memory. `observer` sees every iteration.
TrainResult run_training(const RunConfig& config,
                         const std::function<void(const IterationRecord&)>& observer = {});

/// Trains and writes the run directory:
///   config.echo             resolved config
///   metrics.jsonl           one IterationMetrics per line (deterministic)
///   timing.jsonl            wall time per iteration
///   ledger/iter_<n>.records advantage ledger of iteration n
///   ledger/iter_<n>.batch   batch of iteration n
///   checkpoints/iter_<n>    policy after n updates (iter_0 is the initial policy)
/// The directory must be absent or empty.
TrainResult train(const RunConfig& config, const std::filesystem::path& run_dir);

/// Throws unless `dir` is absent or an empty directory, then creates it.
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace empg

#endif  // EMPG_TRAINER_HPP
