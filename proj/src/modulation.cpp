#include "empg/modulation.hpp"

namespace empg {

std::vector<AdvantageRecord> modulate(const EntropyLedger& ledger, const std::vector<double>& a_outcome,
                                      const ModulationParams& params, Ablation ablation) {
  if (ledger.empty() || ledger.normalized.size() != static_cast<Eigen::Index>(ledger.steps.size()) ||
      ledger.raw.size() != ledger.normalized.size())
    throw Error(ErrorCode::EntropyPipelineMissing, "entropy ledger is empty or incomplete");
  params.validate();

  const Eigen::Index n = ledger.normalized.size();
  const Vector g = uses_scaling(ablation) ? scaling_factors(ledger.normalized, params.k, params.epsilon)
                                          : Vector::Ones(n);

  std::vector<AdvantageRecord> records(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ref = ledger.steps[static_cast<std::size_t>(i)];
    if (ref.traj >= a_outcome.size()) throw Error(ErrorCode::IndexOutOfRange, "missing outcome advantage");
    auto& rec = records[static_cast<std::size_t>(i)];
    rec.traj_index = ref.traj;
    rec.step_index = ref.step;
    rec.a_outcome = a_outcome[ref.traj];
    rec.h_step = ledger.raw[i];
    rec.h_norm = ledger.normalized[i];
    rec.g = g[i];

    // Next step of the same trajectory only; the pool is trajectory-major.
    const bool has_next = i + 1 < n && ledger.steps[static_cast<std::size_t>(i + 1)].traj == ref.traj &&
                          ledger.steps[static_cast<std::size_t>(i + 1)].step == ref.step + 1;
    if (has_next) rec.f_next = clarity_bonus(ledger.normalized[i + 1], params.k_prime);

    rec.a_mod = rec.a_outcome * rec.g;
    if (has_next && uses_bonus(ablation)) rec.a_mod += params.zeta * *rec.f_next;
    rec.a_final = rec.a_mod;
  }
  return records;
}

void final_normalize(std::vector<AdvantageRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyBatch, "no advantages to normalize");
  Vector a_mod(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) a_mod[static_cast<Eigen::Index>(i)] = records[i].a_mod;
  const Vector a_final = final_normalize(a_mod);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].a_final = a_final[static_cast<Eigen::Index>(i)];
}

}  // namespace empg
