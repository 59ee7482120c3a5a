#include "empg/synthetic.hpp"

#include <random>

namespace empg {

SoftmaxPolicy random_policy(std::size_t states, std::vector<std::size_t> vocab, double scale, CounterRng& rng) {
  SoftmaxPolicy policy(states, std::move(vocab));
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& table : policy.tables())
    for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = normal(rng);
  return policy;
}

Batch synthetic_batch(const SoftmaxPolicy& policy, const SyntheticBatchOptions& options, CounterRng& rng) {
  auto below = [&](int n) { return static_cast<int>(uniform01(rng) * n); };
  Batch batch;
  for (int g = 0; g < options.groups; ++g) {
    for (int m = 0; m < options.group_size; ++m) {
      Trajectory t;
      t.group_id = static_cast<std::uint64_t>(g);
      t.task_id = static_cast<std::uint64_t>(g);
      t.seed = rng();
      const int length = options.min_length + below(options.max_length - options.min_length + 1);
      for (int s = 0; s < length; ++s) {
        const StateId state{static_cast<std::uint32_t>(below(static_cast<int>(policy.state_count())))};
        auto sampled = policy.sample_step(state, rng);
        t.steps.push_back({state, sampled.action, sampled.token_entropies, sampled.log_prob});
      }
      if (options.mixed_rewards && m < 2)
        t.terminal_reward = m;
      else
        t.terminal_reward = below(2);
      batch.trajectories.push_back(std::move(t));
    }
  }
  rebuild_groups(batch);
  return batch;
}

}  // namespace empg
