#include "empg/trainer.hpp"

#include "empg/modulation.hpp"
#include "empg/serialization.hpp"
#include "empg/theory.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace empg {

using json = nlohmann::json;

std::string encode_metrics(const IterationMetrics& m) {
  return json{{"iteration", m.iteration},
              {"success_rate", m.success_rate},
              {"mean_step_entropy", m.mean_step_entropy},
              {"mean_abs_a_final", m.mean_abs_a_final},
              {"kl_to_previous", m.kl_to_previous},
              {"dropped_groups", m.dropped_groups},
              {"skipped", m.skipped},
              {"update_norm", m.update_norm}}
      .dump();
}

IterationMetrics decode_metrics(const std::string& line) {
  const auto j = json::parse(line);
  IterationMetrics m;
  m.iteration = j.at("iteration").get<int>();
  m.success_rate = j.at("success_rate").get<double>();
  m.mean_step_entropy = j.at("mean_step_entropy").get<double>();
  m.mean_abs_a_final = j.at("mean_abs_a_final").get<double>();
  m.kl_to_previous = j.at("kl_to_previous").get<double>();
  m.dropped_groups = j.at("dropped_groups").get<int>();
  m.skipped = j.at("skipped").get<bool>();
  m.update_norm = j.at("update_norm").get<double>();
  return m;
}

SoftmaxPolicy initial_policy(const RunConfig& config) {
  SoftmaxPolicy policy(config.env.observation_count(), config.env.vocab_sizes());
  if (config.init_logit_std > 0) {
    CounterRng rng(derive_seed({config.seed, 0x1417u}));
    std::normal_distribution<double> normal(0.0, config.init_logit_std);
    for (auto& table : policy.tables())
      for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = normal(rng);
  }
  return policy;
}

std::uint64_t batch_seed(const RunConfig& config, int iteration) {
  return derive_seed({config.seed, static_cast<std::uint64_t>(iteration)});
}

Trajectory rollout(const SoftmaxPolicy& policy, const EnvSpec& env, std::uint64_t env_seed, std::uint64_t sample_seed) {
  Trajectory traj;
  traj.task_id = env_seed;
  traj.seed = sample_seed;
  CounterRng rng(sample_seed);
  EnvState state = reset(env, env_seed);
  while (!state.done) {
    if (traj.steps.size() >= static_cast<std::size_t>(env.horizon))
      throw Error(ErrorCode::EnvFailure, "episode exceeded its horizon");
    auto sampled = policy.sample_step(state.observation, rng);
    Step step{state.observation, sampled.action, std::move(sampled.token_entropies), sampled.log_prob};
    state = empg::step(env, state, step.action).state;
    traj.steps.push_back(std::move(step));
  }
  traj.terminal_reward = terminal_reward(state);
  return traj;
}

Batch collect_batch(const SoftmaxPolicy& policy, const RunConfig& config, std::uint64_t seed) {
  Batch batch;
  batch.trajectories.reserve(static_cast<std::size_t>(config.tasks_per_batch * config.group_size));
  for (int task = 0; task < config.tasks_per_batch; ++task) {
    const auto env_seed = derive_seed({seed, static_cast<std::uint64_t>(task)});
    for (int member = 0; member < config.group_size; ++member) {
      auto traj = rollout(policy, config.env, env_seed,
                          derive_seed({seed, static_cast<std::uint64_t>(task), static_cast<std::uint64_t>(member)}));
      traj.group_id = static_cast<std::uint64_t>(task);
      batch.trajectories.push_back(std::move(traj));
    }
  }
  rebuild_groups(batch);
  require_valid(batch, static_cast<std::size_t>(config.env.horizon));
  return batch;
}

PipelineResult run_advantage_pipeline(const Batch& batch, const RunConfig& config) {
  require_valid(batch);
  const auto filtered = filter_groups(batch);
  if (filtered.empty()) throw Error(ErrorCode::AllGroupsFiltered, "every group has identical rewards");

  std::vector<double> a_outcome(batch.trajectories.size(), 0.0);
  std::vector<std::size_t> surviving;
  for (auto gid : filtered.surviving) {
    const auto group = group_advantage(batch, gid, config.modulation.epsilon);
    for (std::size_t j = 0; j < group.members.size(); ++j) {
      a_outcome[group.members[j]] = group.advantages[static_cast<Eigen::Index>(j)];
      surviving.push_back(group.members[j]);
    }
  }
  std::sort(surviving.begin(), surviving.end());

  const auto ledger = build_entropy_ledger(batch, surviving, config.modulation.epsilon);
  PipelineResult result;
  result.records = modulate(ledger, a_outcome, config.modulation, config.ablation);
  final_normalize(result.records);
  result.dropped_groups = filtered.dropped;
  return result;
}

LogitTables policy_gradient(const SoftmaxPolicy& policy, const std::vector<AdvantageRecord>& records,
                            const Batch& batch, const RunConfig& config) {
  LogitTables grad = zeros_like(policy.tables());
  for (const auto& rec : records) {
    const auto& step = batch.trajectories.at(rec.traj_index).steps.at(rec.step_index);
    double weight = rec.a_final;
    if (config.update_rule == UpdateRule::clipped) {
      // d/dtheta min(rho A, clip(rho) A) = rho A grad log pi inside the trust
      // region and 0 where the clipped branch is active.
      const double rho = std::exp(policy.log_prob(step.state_id, step.action) - step.old_log_prob);
      const bool clipped = (rec.a_final > 0 && rho > 1.0 + config.clip_high) ||
                           (rec.a_final < 0 && rho < 1.0 - config.clip_low);
      weight = clipped ? 0.0 : rec.a_final * rho;
    }
    if (weight != 0.0) policy.accumulate_score(step.state_id, step.action, weight, grad);
  }
  return grad;
}

UpdateResult update_policy(const SoftmaxPolicy& policy, const std::vector<AdvantageRecord>& records,
                           const Batch& batch, const RunConfig& config, double learning_rate) {
  if (records.empty()) throw Error(ErrorCode::PipelineNotRun, "no advantage records");
  const LogitTables grad = policy_gradient(policy, records, batch, config);
  if (!all_finite(grad)) throw Error(ErrorCode::NonFiniteGradient, "policy gradient is not finite");

  UpdateResult out{policy, 0.0};
  for (std::size_t p = 0; p < grad.size(); ++p) out.policy.logits(p) += learning_rate * grad[p];
  out.update_norm = learning_rate * std::sqrt(squared_norm(grad));
  return out;
}

std::vector<StateId> visited_states(const Batch& batch) {
  std::set<std::uint32_t> seen;
  for (const auto& t : batch.trajectories)
    for (const auto& s : t.steps) seen.insert(index_of(s.state_id));
  std::vector<StateId> out;
  for (auto s : seen) out.push_back(StateId{s});
  return out;
}

double kl_to_previous(const SoftmaxPolicy& old_policy, const SoftmaxPolicy& new_policy,
                      std::span<const StateId> visited) {
  std::set<std::uint32_t> distinct;
  for (auto s : visited) distinct.insert(index_of(s));
  if (distinct.empty()) return 0.0;
  double total = 0.0;
  for (auto s : distinct) total += old_policy.kl_to(new_policy, StateId{s});
  return total / static_cast<double>(distinct.size());
}

TrainResult run_training(const RunConfig& config, const std::function<void(const IterationRecord&)>& observer) {
  config.validate();
  TrainResult result{{}, initial_policy(config)};
  const std::vector<AdvantageRecord> no_records;

  for (int it = 0; it < config.iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    const Batch batch = collect_batch(result.policy, config, batch_seed(config, it));

    IterationMetrics m;
    m.iteration = it;
    double successes = 0.0, entropy_sum = 0.0;
    for (const auto& t : batch.trajectories) {
      successes += t.terminal_reward;
      for (const auto& s : t.steps) entropy_sum += step_entropy(std::span<const double>(s.token_entropies));
    }
    m.success_rate = successes / static_cast<double>(batch.trajectories.size());
    m.mean_step_entropy = entropy_sum / static_cast<double>(batch.step_count());

    PipelineResult pipeline;
    try {
      pipeline = run_advantage_pipeline(batch, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllGroupsFiltered) throw;
      m.skipped = true;
      m.dropped_groups = static_cast<int>(batch.groups.size());
    }

    if (!m.skipped) {
      if (config.debug_checks) {
        const double gap =
            theory::gradient_assembly_identity(pipeline.records, batch, result.policy, config.modulation, config.ablation);
        if (!(gap < 1e-10)) throw Error(ErrorCode::IdentityViolated, "gradient assembly identity violated");
      }
      double abs_sum = 0.0;
      for (const auto& r : pipeline.records) abs_sum += std::abs(r.a_final);
      m.mean_abs_a_final = abs_sum / static_cast<double>(pipeline.records.size());
      m.dropped_groups = static_cast<int>(pipeline.dropped_groups);

      auto update = update_policy(result.policy, pipeline.records, batch, config, config.learning_rate_at(it));
      const auto visited = visited_states(batch);
      m.kl_to_previous = kl_to_previous(result.policy, update.policy, visited);
      m.update_norm = update.update_norm;
      result.policy = std::move(update.policy);
    }
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metrics.push_back(m);
    if (observer) observer({batch, m.skipped ? no_records : pipeline.records, m, result.policy});
  }
  return result;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) throw Error(ErrorCode::Io, "output directory " + dir.string() + " is not empty");
  }
  fs::create_directories(dir);
}

TrainResult train(const RunConfig& config, const std::filesystem::path& run_dir) {
  config.validate();
  prepare_output_dir(run_dir);
  write_new_file(run_dir / "config.echo", echo_config(config));
  write_new_file(run_dir / "checkpoints" / "iter_0", encode_policy(initial_policy(config)));

  std::ofstream metrics(run_dir / "metrics.jsonl");
  std::ofstream timing(run_dir / "timing.jsonl");
  if (!metrics || !timing) throw Error(ErrorCode::Io, "cannot create metric files in " + run_dir.string());

  auto result = run_training(config, [&](const IterationRecord& rec) {
    const int it = rec.metrics.iteration;
    metrics << encode_metrics(rec.metrics) << '\n';
    timing << json{{"iteration", it}, {"wall_time", rec.metrics.wall_time}}.dump() << '\n';
    if (it % config.ledger_every == 0) {
      const auto stem = run_dir / "ledger" / ("iter_" + std::to_string(it));
      write_new_file(stem.string() + ".records", encode_records(rec.records));
      write_new_file(stem.string() + ".batch", encode_batch(rec.batch));
    }
    const int updates = it + 1;
    if (updates % config.checkpoint_every == 0 || updates == config.iterations)
      write_new_file(run_dir / "checkpoints" / ("iter_" + std::to_string(updates)), encode_policy(rec.policy_after));
  });
  metrics.flush();
  if (!metrics) throw Error(ErrorCode::Io, "failed writing metrics");
  return result;
}

}  // namespace empg
