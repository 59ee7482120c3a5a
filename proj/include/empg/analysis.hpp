#ifndef EMPG_ANALYSIS_HPP
#define EMPG_ANALYSIS_HPP

#include "empg/core_model.hpp"
#include "empg/policy.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace empg {

// ------------------------------------------------ entropy change by percentile

struct VisitedStep {
  StateId state{};
  double h_before = 0.0;  // step entropy recorded at rollout time
};

std::vector<VisitedStep> visited_steps(const Batch& batch);

struct PercentileBin {
  double lower = 0.0;  // percent
  double upper = 0.0;
  double mean_entropy_change = 0.0;  // nats, mean of H_after - H_before
  std::size_t count = 0;
};

/// Twenty 5% bins over the percentile rank of H_before. Ranks are taken on
/// the sorted distinct values, r / (D - 1) * 100, so duplicating steps does
/// not move them. H_after is the step entropy of `after` at the same state.
std::vector<PercentileBin> entropy_change_by_percentile(std::span<const VisitedStep> steps, const SoftmaxPolicy& after);

std::string percentile_table(const std::vector<PercentileBin>& bins);

/// Entropy-change analysis of a run directory: steps of ledger/iter_0.batch
/// against the highest-numbered checkpoint.
std::vector<PercentileBin> analyze_run_percentiles(const std::filesystem::path& run_dir);

// ------------------------------------------------ run comparison

struct CurvePoint {
  int iteration = 0;
  std::string label;
  std::uint64_t seed = 0;
  double value = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

struct FinalWindow {
  std::string label;
  std::uint64_t seed = 0;
  double mean = 0.0;

  bool operator==(const FinalWindow&) const = default;
};

struct CurveTable {
  std::string metric;
  std::vector<CurvePoint> points;  // sorted by (iteration, label, seed)
  std::vector<FinalWindow> finals;  // sorted by (label, seed)

  bool operator==(const CurveTable&) const = default;
};

struct RunCurve {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<int> iterations;
  std::vector<double> values;
};

/// Loads one metric of a run directory.
RunCurve load_run_curve(const std::filesystem::path& run_dir, const std::string& metric);

/// Mean over the last 10% of iterations (at least one).
double final_window_mean(std::span<const double> values);

/// Long-format comparison. Throws MismatchedGrids when the runs do not share
/// one iteration grid.
CurveTable compare_runs(std::span<const RunCurve> runs, const std::string& metric);
CurveTable compare_runs(const std::vector<std::filesystem::path>& run_dirs, const std::string& metric);

/// "iteration\tlabel\tseed\t<metric>" rows.
std::string curve_tsv(const CurveTable& table);
/// "label\tseed\tfinal_window_mean" rows.
std::string finals_tsv(const CurveTable& table);

}  // namespace empg

#endif  // EMPG_ANALYSIS_HPP
