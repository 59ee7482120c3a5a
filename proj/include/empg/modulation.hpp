#ifndef EMPG_MODULATION_HPP
#define EMPG_MODULATION_HPP

// Entropy-driven advantage reshaping: confidence-based gradient scaling g,
// next-step clarity bonus f, the modulated advantage and its zero-mean
// normalization.

#include "empg/core_model.hpp"
#include "empg/entropy.hpp"
#include "empg/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace empg {

/// g_t = exp(-k h_t) / mean_batch(exp(-k h)).
///
/// The denominator is floored at epsilon instead of having epsilon added, so
/// the per-step batch mean of g is one up to rounding. For h in [0, 1] the
/// mean is at least exp(-k), so the floor only matters for extreme k.
template <typename Derived>
VectorX<typename Derived::Scalar> scaling_factors(const Eigen::MatrixBase<Derived>& h_norm,
                                                  typename Derived::Scalar k,
                                                  typename Derived::Scalar epsilon) {
  using Scalar = typename Derived::Scalar;
  if (h_norm.size() == 0) throw Error(ErrorCode::EmptyBatch, "no steps to scale");
  const VectorX<Scalar> base = (-k * h_norm.array()).exp().matrix();
  return base / std::max<Scalar>(base.mean(), epsilon);
}

/// f = exp(-k' h_next), in (0, 1].
template <typename Scalar>
Scalar clarity_bonus(Scalar h_norm_next, Scalar k_prime) {
  return std::exp(-k_prime * h_norm_next);
}

/// Subtracts the per-step batch mean.
template <typename Derived>
VectorX<typename Derived::Scalar> final_normalize(const Eigen::MatrixBase<Derived>& a_mod) {
  if (a_mod.size() == 0) throw Error(ErrorCode::EmptyBatch, "no advantages to normalize");
  return (a_mod.array() - a_mod.mean()).matrix();
}

/// Builds one AdvantageRecord per pooled step and fills a_mod:
///   A_mod = A * g(H_t) + zeta * f(H_{t+1})   for non-final steps,
///   A_mod = A * g(H_t)                        at a trajectory's final step.
/// `a_outcome` is indexed by trajectory index in the batch. Ablations pin
/// g to one and/or drop the bonus. a_final is left equal to a_mod.
std::vector<AdvantageRecord> modulate(const EntropyLedger& ledger, const std::vector<double>& a_outcome,
                                      const ModulationParams& params, Ablation ablation);

/// In-place zero-mean normalization of a_mod into a_final.
void final_normalize(std::vector<AdvantageRecord>& records);

}  // namespace empg

#endif  // EMPG_MODULATION_HPP
