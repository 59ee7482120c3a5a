#ifndef EMPG_POLICY_HPP
#define EMPG_POLICY_HPP

#include "empg/core_model.hpp"
#include "empg/rng.hpp"
#include "empg/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace empg {

/// Probability floor applied before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

// ------------------------------------------------ softmax kernels

template <typename Derived>
VectorX<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar shift = logits.maxCoeff();
  const Scalar log_norm = std::log((logits.array() - shift).exp().sum());
  return (logits.array() - shift - log_norm).matrix();
}

template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

/// Shannon entropy in nats; zero-probability entries contribute 0.
template <typename Derived>
typename Derived::Scalar shannon_entropy(const Eigen::MatrixBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const Scalar p = probs[i];
    if (p > 0) h -= p * std::log(std::max<Scalar>(p, Scalar(kProbabilityFloor)));
  }
  return std::max<Scalar>(h, Scalar(0));
}

/// d log pi_k / d z_i = delta_ik - pi_i.
template <typename Derived>
VectorX<typename Derived::Scalar> score_vector(const Eigen::MatrixBase<Derived>& probs, Eigen::Index k) {
  VectorX<typename Derived::Scalar> s = -probs;
  s[k] += 1;
  return s;
}

/// KL(p || q) in nats.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar kl_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  Scalar kl = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    kl += p[i] * (std::log(std::max<Scalar>(p[i], Scalar(kProbabilityFloor))) -
                  std::log(std::max<Scalar>(q[i], Scalar(kProbabilityFloor))));
  }
  return std::max<Scalar>(kl, Scalar(0));
}

/// Draws an index from a probability vector with one uniform variate.
template <typename Derived, typename Rng>
Eigen::Index sample_categorical(const Eigen::MatrixBase<Derived>& probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += static_cast<double>(probs[i]);
    if (u < acc) return i;
  }
  Eigen::Index last = probs.size() - 1;
  while (last > 0 && probs[last] <= 0) --last;
  return last;
}

// ------------------------------------------------ policy tables

/// One logit table per sub-token position: rows are states, columns the sub-vocabulary.
using LogitTables = std::vector<Matrix>;

LogitTables zeros_like(const LogitTables& tables);
double squared_norm(const LogitTables& tables);
bool all_finite(const LogitTables& tables);

struct SampledStep {
  CompositeAction action;
  std::vector<double> token_entropies;
  double log_prob = 0.0;
};

/// Tabular softmax policy over composite actions of L independent sub-choices.
/// L = 1 is the plain tabular softmax policy.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy() = default;
  SoftmaxPolicy(std::size_t state_count, std::vector<std::size_t> vocab_sizes);

  static SoftmaxPolicy tabular(std::size_t state_count, std::size_t action_count) {
    return SoftmaxPolicy(state_count, {action_count});
  }

  std::size_t state_count() const { return state_count_; }
  std::size_t positions() const { return tables_.size(); }
  std::size_t vocab_size(std::size_t position) const;

  const LogitTables& tables() const { return tables_; }
  LogitTables& tables() { return tables_; }
  const Matrix& logits(std::size_t position = 0) const { return tables_.at(position); }
  Matrix& logits(std::size_t position = 0) { return tables_.at(position); }

  Vector action_distribution(StateId state, std::size_t position = 0) const;
  Vector score_logits(StateId state, std::uint32_t action, std::size_t position = 0) const;
  double policy_entropy(StateId state, std::size_t position = 0) const;

  /// Positional entropies for one state.
  std::vector<double> token_entropies(StateId state) const;
  /// Mean of the positional entropies.
  double step_entropy(StateId state) const;

  double log_prob(StateId state, const CompositeAction& action) const;

  /// Adds weight * grad_z log pi(action | state) into `grad`.
  void accumulate_score(StateId state, const CompositeAction& action, double weight, LogitTables& grad) const;

  SampledStep sample_step(StateId state, CounterRng& rng) const;

  /// Sum of positional KL(this || other) at one state.
  double kl_to(const SoftmaxPolicy& other, StateId state) const;

  bool operator==(const SoftmaxPolicy& other) const;

 private:
  void check_state(StateId state) const;
  void check_action(const CompositeAction& action) const;

  std::size_t state_count_ = 0;
  LogitTables tables_;
};

}  // namespace empg

#endif  // EMPG_POLICY_HPP
