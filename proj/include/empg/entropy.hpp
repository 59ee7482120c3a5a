#ifndef EMPG_ENTROPY_HPP
#define EMPG_ENTROPY_HPP

#include "empg/core_model.hpp"
#include "empg/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace empg {

/// Step entropy: arithmetic mean of the per-sub-token entropies.
template <typename Derived>
typename Derived::Scalar step_entropy(const Eigen::MatrixBase<Derived>& token_entropies) {
  if (token_entropies.size() == 0) throw Error(ErrorCode::EmptyStep, "step has no token entropies");
  return token_entropies.mean();
}

inline double step_entropy(std::span<const double> token_entropies) {
  return step_entropy(Eigen::Map<const Vector>(token_entropies.data(), static_cast<Eigen::Index>(token_entropies.size())));
}

/// Batch min-max scaling, (H - min) / (max - min + epsilon). Outputs lie in [0, 1).
template <typename Derived>
VectorX<typename Derived::Scalar> minmax_normalize(const Eigen::MatrixBase<Derived>& entropies,
                                                   typename Derived::Scalar epsilon) {
  if (entropies.size() == 0) throw Error(ErrorCode::EmptyBatch, "no entropies to normalize");
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const auto lo = entropies.minCoeff();
  const auto hi = entropies.maxCoeff();
  return ((entropies.array() - lo) / (hi - lo + epsilon)).matrix();
}

struct StepRef {
  std::size_t traj = 0;
  std::size_t step = 0;
};

/// Raw and normalized step entropies for one normalization pool, in
/// trajectory-major order.
struct EntropyLedger {
  std::vector<StepRef> steps;
  Vector raw;
  Vector normalized;
  double batch_min = 0.0;
  double batch_max = 0.0;

  bool empty() const { return steps.empty(); }
};

/// Pools every step of the listed trajectories and normalizes them together.
EntropyLedger build_entropy_ledger(const Batch& batch, std::span<const std::size_t> trajectories, double epsilon);

}  // namespace empg

#endif  // EMPG_ENTROPY_HPP
