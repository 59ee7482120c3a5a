#include "empg/entropy.hpp"

namespace empg {

EntropyLedger build_entropy_ledger(const Batch& batch, std::span<const std::size_t> trajectories, double epsilon) {
  EntropyLedger ledger;
  std::vector<double> raw;
  for (std::size_t i : trajectories) {
    if (i >= batch.trajectories.size()) throw Error(ErrorCode::IndexOutOfRange, "trajectory index out of range");
    const auto& steps = batch.trajectories[i].steps;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      ledger.steps.push_back({i, t});
      raw.push_back(step_entropy(std::span<const double>(steps[t].token_entropies)));
    }
  }
  if (raw.empty()) throw Error(ErrorCode::EmptyBatch, "no steps in the normalization pool");
  ledger.raw = Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  ledger.normalized = minmax_normalize(ledger.raw, epsilon);
  ledger.batch_min = ledger.raw.minCoeff();
  ledger.batch_max = ledger.raw.maxCoeff();
  return ledger;
}

}  // namespace empg
