#include "empg/analysis.hpp"

#include "empg/config.hpp"
#include "empg/entropy.hpp"
#include "empg/serialization.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace empg {

namespace fs = std::filesystem;

std::vector<VisitedStep> visited_steps(const Batch& batch) {
  std::vector<VisitedStep> out;
  for (const auto& t : batch.trajectories)
    for (const auto& s : t.steps) out.push_back({s.state_id, step_entropy(std::span<const double>(s.token_entropies))});
  return out;
}

std::vector<PercentileBin> entropy_change_by_percentile(std::span<const VisitedStep> steps, const SoftmaxPolicy& after) {
  if (steps.empty()) throw Error(ErrorCode::EmptyLedger, "no steps to analyze");

  std::vector<double> distinct;
  for (const auto& s : steps) distinct.push_back(s.h_before);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<PercentileBin> bins(20);
  std::vector<double> sums(20, 0.0);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bins[b].lower = 5.0 * static_cast<double>(b);
    bins[b].upper = 5.0 * static_cast<double>(b + 1);
  }
  for (const auto& s : steps) {
    const auto rank = static_cast<double>(std::lower_bound(distinct.begin(), distinct.end(), s.h_before) - distinct.begin());
    const double pct = distinct.size() > 1 ? 100.0 * rank / static_cast<double>(distinct.size() - 1) : 0.0;
    const auto b = std::min<std::size_t>(19, static_cast<std::size_t>(pct / 5.0));
    sums[b] += after.step_entropy(s.state) - s.h_before;
    ++bins[b].count;
  }
  for (std::size_t b = 0; b < bins.size(); ++b)
    if (bins[b].count > 0) bins[b].mean_entropy_change = sums[b] / static_cast<double>(bins[b].count);
  return bins;
}

std::string percentile_table(const std::vector<PercentileBin>& bins) {
  std::ostringstream os;
  os << "lower\tupper\tcount\tmean_entropy_change\n";
  for (const auto& b : bins) os << b.lower << '\t' << b.upper << '\t' << b.count << '\t' << b.mean_entropy_change << '\n';
  return os.str();
}

std::vector<PercentileBin> analyze_run_percentiles(const fs::path& run_dir) {
  const auto batch_path = run_dir / "ledger" / "iter_0.batch";
  if (!fs::exists(batch_path)) throw Error(ErrorCode::EmptyLedger, "run has no first-iteration batch ledger");
  const Batch batch = decode_batch(read_text(batch_path));

  int best = -1;
  fs::path best_path;
  for (const auto& entry : fs::directory_iterator(run_dir / "checkpoints")) {
    const auto name = entry.path().filename().string();
    if (name.rfind("iter_", 0) != 0) continue;
    const int n = std::stoi(name.substr(5));
    if (n > best) {
      best = n;
      best_path = entry.path();
    }
  }
  if (best < 0) throw Error(ErrorCode::Io, "run has no checkpoints");
  const auto steps = visited_steps(batch);
  return entropy_change_by_percentile(steps, decode_policy(read_text(best_path)));
}

RunCurve load_run_curve(const fs::path& run_dir, const std::string& metric) {
  const auto config = load_config(run_dir / "config.echo");
  RunCurve curve;
  curve.label = config.display_label();
  curve.seed = config.seed;
  std::istringstream in(read_text(run_dir / "metrics.jsonl"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (!j.contains(metric)) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
    curve.iterations.push_back(j.at("iteration").get<int>());
    curve.values.push_back(j.at(metric).get<double>());
  }
  return curve;
}

double final_window_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(values.size()))));
  double s = 0.0;
  for (std::size_t i = values.size() - window; i < values.size(); ++i) s += values[i];
  return s / static_cast<double>(window);
}

CurveTable compare_runs(std::span<const RunCurve> runs, const std::string& metric) {
  if (runs.size() < 2) throw Error(ErrorCode::InvalidArgument, "compare_runs needs at least two runs");
  for (const auto& r : runs)
    if (r.iterations != runs.front().iterations || r.values.size() != r.iterations.size())
      throw Error(ErrorCode::MismatchedGrids, "runs do not share an iteration grid");

  CurveTable table;
  table.metric = metric;
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < r.iterations.size(); ++i) table.points.push_back({r.iterations[i], r.label, r.seed, r.values[i]});
    table.finals.push_back({r.label, r.seed, final_window_mean(r.values)});
  }
  auto point_key = [](const CurvePoint& p) { return std::tie(p.iteration, p.label, p.seed, p.value); };
  std::sort(table.points.begin(), table.points.end(),
            [&](const CurvePoint& a, const CurvePoint& b) { return point_key(a) < point_key(b); });
  std::sort(table.finals.begin(), table.finals.end(), [](const FinalWindow& a, const FinalWindow& b) {
    return std::tie(a.label, a.seed, a.mean) < std::tie(b.label, b.seed, b.mean);
  });
  return table;
}

CurveTable compare_runs(const std::vector<fs::path>& run_dirs, const std::string& metric) {
  std::vector<RunCurve> curves;
  for (const auto& dir : run_dirs) curves.push_back(load_run_curve(dir, metric));
  return compare_runs(curves, metric);
}

namespace {

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string curve_tsv(const CurveTable& table) {
  std::ostringstream os;
  os << "iteration\tlabel\tseed\t" << table.metric << '\n';
  for (const auto& p : table.points) os << p.iteration << '\t' << p.label << '\t' << p.seed << '\t' << format(p.value) << '\n';
  return os.str();
}

std::string finals_tsv(const CurveTable& table) {
  std::ostringstream os;
  os << "label\tseed\tfinal_window_mean\n";
  for (const auto& f : table.finals) os << f.label << '\t' << f.seed << '\t' << format(f.mean) << '\n';
  return os.str();
}

}  // namespace empg
