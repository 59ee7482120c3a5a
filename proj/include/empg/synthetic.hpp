#ifndef EMPG_SYNTHETIC_HPP
#define EMPG_SYNTHETIC_HPP

#include "empg/core_model.hpp"
#include "empg/policy.hpp"
#include "empg/rng.hpp"

namespace empg {

struct SyntheticBatchOptions {
  int groups = 3;
  int group_size = 4;
  int min_length = 1;
  int max_length = 6;
  /// Guarantees at least one success and one failure per group.
  bool mixed_rewards = true;
};

/// Random batch whose actions are sampled from `policy` (random states), so
/// old_log_prob and token entropies are consistent with it.
Batch synthetic_batch(const SoftmaxPolicy& policy, const SyntheticBatchOptions& options, CounterRng& rng);

/// Policy with i.i.d. N(0, scale^2) logits.
SoftmaxPolicy random_policy(std::size_t states, std::vector<std::size_t> vocab, double scale, CounterRng& rng);

}  // namespace empg

#endif  // EMPG_SYNTHETIC_HPP
