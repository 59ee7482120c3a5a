#ifndef EMPG_THEORY_HPP
#define EMPG_THEORY_HPP

// Numeric checks of the coupling between the logit-space score norm and the
// policy's collision entropy, plus the gradient-assembly identity.

#include "empg/core_model.hpp"
#include "empg/policy.hpp"
#include "empg/rng.hpp"
#include "empg/types.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace empg::theory {

/// A strictly positive probability vector (n >= 2) summing to one.
template <typename Scalar>
class PolicyProbe {
 public:
  explicit PolicyProbe(VectorX<Scalar> pi) : pi_(std::move(pi)) {
    if (pi_.size() < 2) throw Error(ErrorCode::InvalidArgument, "probe needs at least 2 actions");
    if (!(pi_.minCoeff() > 0)) throw Error(ErrorCode::InvalidArgument, "probe must be strictly positive");
    if (std::abs(pi_.sum() - Scalar(1)) > Scalar(1e-12))
      throw Error(ErrorCode::InvalidArgument, "probe must sum to one");
  }

  const VectorX<Scalar>& pi() const { return pi_; }
  Eigen::Index size() const { return pi_.size(); }

 private:
  VectorX<Scalar> pi_;
};

/// ||grad_z log pi_k||^2 = 1 - 2 pi_k + sum_j pi_j^2.
/// Accepts any probability vector, including one-hot.
template <typename Derived>
typename Derived::Scalar per_action_norm_sq(const Eigen::MatrixBase<Derived>& pi, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  if (k < 0 || k >= pi.size()) throw Error(ErrorCode::IndexOutOfRange, "action index out of range");
  return Scalar(1) - Scalar(2) * pi[k] + pi.squaredNorm();
}

/// E_{k~pi} ||grad_z log pi_k||^2 = 1 - sum_j pi_j^2.
template <typename Derived>
typename Derived::Scalar expected_norm_sq(const Eigen::MatrixBase<Derived>& pi) {
  return typename Derived::Scalar(1) - pi.squaredNorm();
}

/// Collision (order-2 Renyi) entropy, -ln sum_j pi_j^2.
template <typename Derived>
typename Derived::Scalar renyi2(const Eigen::MatrixBase<Derived>& pi) {
  using Scalar = typename Derived::Scalar;
  return std::max<Scalar>(-std::log(pi.squaredNorm()), Scalar(0));
}

template <typename Scalar>
Scalar per_action_norm_sq(const PolicyProbe<Scalar>& probe, Eigen::Index k) {
  return per_action_norm_sq(probe.pi(), k);
}
template <typename Scalar>
Scalar expected_norm_sq(const PolicyProbe<Scalar>& probe) {
  return expected_norm_sq(probe.pi());
}
template <typename Scalar>
Scalar renyi2(const PolicyProbe<Scalar>& probe) {
  return renyi2(probe.pi());
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Samples k ~ pi and averages per_action_norm_sq.
template <typename Derived>
MonteCarloEstimate monte_carlo_norm_sq(const Eigen::MatrixBase<Derived>& pi, std::size_t n_samples, CounterRng& rng) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1");
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = static_cast<double>(per_action_norm_sq(pi, sample_categorical(pi, rng)));
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double var = n_samples > 1 ? m2 / static_cast<double>(n_samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

/// Random point on the simplex: normalized exponentials of standard normals.
/// The normals come from std::normal_distribution driven by a CounterRng.
Vector random_simplex(Eigen::Index n, CounterRng& rng);

/// Assembles the logit-space gradient of a processed batch in two independent
/// ways and returns the largest elementwise discrepancy:
///   (a) sum_t a_final(t) * score(t)
///   (b) sum_t A*g(t) * score(t) + sum_t zeta*f_next(t) * score(t) - mean_shift * sum_t score(t)
double gradient_assembly_identity(const std::vector<AdvantageRecord>& records, const Batch& batch,
                                  const SoftmaxPolicy& policy, const ModulationParams& params, Ablation ablation);

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyOptions {
  std::size_t probes = 1000;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  /// Test hook: adds this offset to the closed-form expected norm.
  double injected_fault = 0.0;
};

/// Runs the identity suite behind the `verify` subcommand.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace empg::theory

#endif  // EMPG_THEORY_HPP
