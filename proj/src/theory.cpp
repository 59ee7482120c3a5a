#include "empg/theory.hpp"

#include "empg/entropy.hpp"
#include "empg/modulation.hpp"
#include "empg/outcome.hpp"
#include "empg/synthetic.hpp"

#include <algorithm>
#include <random>

namespace empg::theory {

Vector random_simplex(Eigen::Index n, CounterRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return softmax(z);
}

double gradient_assembly_identity(const std::vector<AdvantageRecord>& records, const Batch& batch,
                                  const SoftmaxPolicy& policy, const ModulationParams& params, Ablation ablation) {
  if (records.empty()) throw Error(ErrorCode::PipelineNotRun, "no advantage records to assemble");

  LogitTables direct = zeros_like(policy.tables());
  LogitTables scaled = zeros_like(policy.tables());
  LogitTables bonus = zeros_like(policy.tables());
  LogitTables score_sum = zeros_like(policy.tables());

  double shift = 0.0;
  for (const auto& rec : records) {
    const auto& step = batch.trajectories.at(rec.traj_index).steps.at(rec.step_index);
    const double extrinsic = rec.a_outcome * rec.g;
    const double intrinsic = (uses_bonus(ablation) && rec.f_next) ? params.zeta * *rec.f_next : 0.0;
    shift += extrinsic + intrinsic;

    policy.accumulate_score(step.state_id, step.action, rec.a_final, direct);
    policy.accumulate_score(step.state_id, step.action, extrinsic, scaled);
    if (intrinsic != 0.0) policy.accumulate_score(step.state_id, step.action, intrinsic, bonus);
    policy.accumulate_score(step.state_id, step.action, 1.0, score_sum);
  }
  shift /= static_cast<double>(records.size());

  double worst = 0.0;
  for (std::size_t p = 0; p < direct.size(); ++p) {
    const Matrix assembled = scaled[p] + bonus[p] - shift * score_sum[p];
    worst = std::max(worst, (direct[p] - assembled).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

CheckResult make_check(std::string name, double max_error, double tolerance) {
  return {std::move(name), max_error, tolerance, max_error < tolerance};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  if (options.mc_samples < 1) throw Error(ErrorCode::InvalidArgument, "Monte Carlo sample count must be at least 1");
  if (options.probes < 1) throw Error(ErrorCode::InvalidArgument, "probe count must be at least 1");

  CounterRng rng(derive_seed({options.seed, 0x7e0u}));
  std::vector<CheckResult> out;

  double renyi_err = 0.0, enum_err = 0.0, per_action_err = 0.0;
  std::vector<std::pair<double, double>> coupling;
  for (std::size_t i = 0; i < options.probes; ++i) {
    const auto n = static_cast<Eigen::Index>(2 + i % 63);
    const PolicyProbe<double> probe(random_simplex(n, rng));
    const auto& pi = probe.pi();
    const double closed = expected_norm_sq(probe) + options.injected_fault;
    renyi_err = std::max(renyi_err, std::abs(closed - (1.0 - std::exp(-renyi2(probe)))));

    double enumerated = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double per_action = per_action_norm_sq(probe, k);
      enumerated += pi[k] * per_action;
      per_action_err = std::max(per_action_err, std::abs(per_action - score_vector(pi, k).squaredNorm()));
    }
    enum_err = std::max(enum_err, std::abs(closed - enumerated));
    coupling.emplace_back(renyi2(probe), closed);
  }
  out.push_back(make_check("norm_sq == 1 - exp(-renyi2)", renyi_err, 1e-10));
  out.push_back(make_check("norm_sq == sum_k pi_k * per_action_k", enum_err, 1e-12));
  out.push_back(make_check("per_action == ||delta - pi||^2", per_action_err, 1e-12));

  std::sort(coupling.begin(), coupling.end());
  double violations = 0.0;
  for (std::size_t i = 1; i < coupling.size(); ++i)
    if (coupling[i].first > coupling[i - 1].first + 1e-12 && !(coupling[i].second > coupling[i - 1].second))
      violations += 1.0;
  out.push_back(make_check("monotone coupling (violations)", violations, 0.5));

  double worst_z = 0.0;
  for (const Vector& pi : {Vector(Vector::Constant(2, 0.5)), Vector((Vector(3) << 0.7, 0.2, 0.1).finished())}) {
    const auto mc = monte_carlo_norm_sq(pi, options.mc_samples, rng);
    const double gap = std::abs(mc.estimate - expected_norm_sq(pi));
    worst_z = std::max(worst_z, mc.std_error > 0 ? gap / mc.std_error : (gap > 0 ? 1e9 : 0.0));
  }
  out.push_back(make_check("Monte Carlo |z| (3 sigma)", worst_z, 3.0));

  double fd_err = 0.0;
  const double h = 1e-5;
  for (int draw = 0; draw < 100; ++draw) {
    const auto n = static_cast<Eigen::Index>(2 + draw % 7);
    auto policy = random_policy(1, {static_cast<std::size_t>(n)}, 1.5, rng);
    const auto k = static_cast<std::uint32_t>(uniform01(rng) * static_cast<double>(n));
    const Vector analytic = policy.score_logits(StateId{0}, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto plus = policy, minus = policy;
      plus.logits()(0, i) += h;
      minus.logits()(0, i) -= h;
      const double fd = (plus.log_prob(StateId{0}, {k}) - minus.log_prob(StateId{0}, {k})) / (2 * h);
      fd_err = std::max(fd_err, std::abs(fd - analytic[i]));
    }
  }
  out.push_back(make_check("score vs central differences", fd_err, 1e-6));

  double assembly_err = 0.0;
  const ModulationParams params{1.0, 1.0, 0.1, 1e-8};
  for (int trial = 0; trial < 20; ++trial) {
    const auto policy = random_policy(6, {3, 4}, 1.0, rng);
    const Batch batch = synthetic_batch(policy, {}, rng);
    std::vector<double> a_outcome(batch.trajectories.size());
    std::vector<std::size_t> all;
    for (const auto& [gid, members] : batch.groups) {
      const auto g = group_advantage(batch, gid, params.epsilon);
      for (std::size_t j = 0; j < members.size(); ++j) a_outcome[members[j]] = g.advantages[static_cast<Eigen::Index>(j)];
    }
    for (std::size_t i = 0; i < batch.trajectories.size(); ++i) all.push_back(i);
    auto records = modulate(build_entropy_ledger(batch, all, params.epsilon), a_outcome, params, Ablation::full);
    final_normalize(records);
    assembly_err = std::max(assembly_err, gradient_assembly_identity(records, batch, policy, params, Ablation::full));
  }
  out.push_back(make_check("gradient assembly identity", assembly_err, 1e-10));
  return out;
}

}  // namespace empg::theory
