// Command-line entry point: verify | train | ablate | analyze | export.
//
// Exit codes: 0 success, 1 verification or run failure, 2 usage/config error.

#include "empg/analysis.hpp"
#include "empg/config.hpp"
#include "empg/serialization.hpp"
#include "empg/theory.hpp"
#include "empg/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace empg;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

fs::path output_root() {
  if (const char* root = std::getenv("EMPG_OUTPUT_ROOT"); root && *root) return root;
  return "runs";
}

std::string run_name(const RunConfig& c) {
  const std::string env = c.env_preset.empty() ? std::string(to_string(c.env.kind)) : c.env_preset;
  return env + "-" + c.display_label() + "-seed" + std::to_string(c.seed);
}

RunConfig resolve(const std::string& config_path, const std::vector<std::string>& overrides,
                  std::optional<std::uint64_t> seed) {
  RunConfig config = load_config(config_path, overrides);
  if (seed) config.seed = *seed;
  return config;
}

int cmd_verify(std::size_t probes, std::size_t samples, std::uint64_t seed, double fault) {
  if (samples < 1) {
    std::cerr << "error: --samples must be at least 1\n";
    return kUsage;
  }
  theory::VerifyOptions options;
  options.probes = probes;
  options.mc_samples = samples;
  options.seed = seed;
  options.injected_fault = fault;
  const auto checks = theory::run_verification(options);
  bool ok = true;
  std::printf("%-36s %14s %10s  %s\n", "check", "max_error", "tolerance", "result");
  for (const auto& c : checks) {
    std::printf("%-36s %14.3e %10.1e  %s\n", c.name.c_str(), c.max_error, c.tolerance, c.passed ? "PASS" : "FAIL");
    ok = ok && c.passed;
  }
  return ok ? kOk : kFailure;
}

int cmd_train(const RunConfig& config, std::optional<fs::path> out) {
  const fs::path dir = out ? *out : output_root() / run_name(config);
  std::cout << "run directory: " << dir.string() << '\n';
  const auto result = train(config, dir);
  if (!result.metrics.empty()) {
    const auto& last = result.metrics.back();
    std::cout << "iterations: " << result.metrics.size() << "  final success_rate: " << last.success_rate << '\n';
  }
  return kOk;
}

int cmd_ablate(RunConfig base, std::optional<fs::path> out, const std::string& metric) {
  const fs::path root = out ? *out : output_root() / ("ablate-" + run_name(base));
  prepare_output_dir(root);
  std::cout << "ablation root: " << root.string() << '\n';
  std::vector<fs::path> dirs;
  for (auto variant : {Ablation::baseline, Ablation::scaling_only, Ablation::bonus_only, Ablation::full}) {
    for (auto seed : base.seeds) {
      RunConfig config = base;
      config.ablation = variant;
      config.seed = seed;
      config.label.clear();
      const auto dir = root / std::string(to_string(variant)) / ("seed_" + std::to_string(seed));
      std::cout << "  " << dir.string() << '\n';
      train(config, dir);
      dirs.push_back(dir);
    }
  }
  const auto table = compare_runs(dirs, metric);
  write_new_file(root / "comparison.tsv", curve_tsv(table));
  write_new_file(root / "final_window.tsv", finals_tsv(table));
  std::cout << finals_tsv(table);
  return kOk;
}

int cmd_export(const std::optional<fs::path>& checkpoint, const std::optional<fs::path>& ledger) {
  if (checkpoint) {
    const auto policy = decode_policy(read_text(*checkpoint));
    std::cout << "state\tposition\taction\tlogit\tprobability\n";
    for (std::size_t s = 0; s < policy.state_count(); ++s)
      for (std::size_t p = 0; p < policy.positions(); ++p) {
        const auto probs = policy.action_distribution(StateId{static_cast<std::uint32_t>(s)}, p);
        for (std::size_t a = 0; a < policy.vocab_size(p); ++a)
          std::cout << s << '\t' << p << '\t' << a << '\t' << policy.logits(p)(s, a) << '\t' << probs[a] << '\n';
      }
    return kOk;
  }
  if (ledger) {
    std::cout << "traj\tstep\ta_outcome\th_step\th_norm\tg\tf_next\ta_mod\ta_final\n";
    for (const auto& r : decode_records(read_text(*ledger))) {
      std::cout << r.traj_index << '\t' << r.step_index << '\t' << r.a_outcome << '\t' << r.h_step << '\t' << r.h_norm
                << '\t' << r.g << '\t';
      if (r.f_next)
        std::cout << *r.f_next;
      else
        std::cout << "NA";
      std::cout << '\t' << r.a_mod << '\t' << r.a_final << '\n';
    }
    return kOk;
  }
  std::cerr << "error: export needs --checkpoint or --ledger\n";
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-modulated policy gradient laboratory"};
  app.require_subcommand(1);

  std::size_t probes = 1000, samples = 100000;
  std::uint64_t verify_seed = 0;
  double fault = 0.0;
  auto* verify = app.add_subcommand("verify", "Check the score-norm / entropy identities");
  verify->add_option("--probes", probes, "Random simplex probes");
  verify->add_option("--samples", samples, "Monte Carlo samples per probe");
  verify->add_option("--seed", verify_seed, "Seed");
  verify->add_option("--inject-fault", fault, "Test hook: offset added to the closed-form norm");

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file")->required();
    cmd->add_option("--set", overrides, "Override, key=value (repeatable)");
    cmd->add_option("--seed", seed, "Seed override");
    cmd->add_option("--out", out, "Output directory (default: $EMPG_OUTPUT_ROOT or ./runs)");
  };
  auto* train_cmd = app.add_subcommand("train", "Train one run");
  add_run_options(train_cmd);

  std::string seeds_text, metric = "success_rate";
  auto* ablate = app.add_subcommand("ablate", "Run baseline / scaling_only / bonus_only / full on identical seeds");
  add_run_options(ablate);
  ablate->add_option("--seeds", seeds_text, "Comma-separated seeds (default: run.seeds)");
  ablate->add_option("--metric", metric, "Metric for the comparison table");

  std::vector<std::string> runs;
  std::optional<std::string> percentile_run;
  auto* analyze = app.add_subcommand("analyze", "Compare runs or compute entropy change by percentile");
  analyze->add_option("--runs", runs, "Run directories to compare");
  analyze->add_option("--metric", metric, "Metric to compare");
  analyze->add_option("--percentiles", percentile_run, "Run directory for the entropy-percentile analysis");

  std::optional<std::string> checkpoint, ledger;
  auto* export_cmd = app.add_subcommand("export", "Print a checkpoint or advantage ledger as a table");
  export_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
  export_cmd->add_option("--ledger", ledger, "Advantage ledger file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return cmd_verify(probes, samples, verify_seed, fault);
    if (*train_cmd) return cmd_train(resolve(config_path, overrides, seed), out ? std::optional<fs::path>(*out) : std::nullopt);
    if (*ablate) {
      auto base = resolve(config_path, overrides, seed);
      if (!seeds_text.empty()) base = resolve_config(parse_key_values(echo_config(base)), {{"run.seeds", seeds_text}});
      return cmd_ablate(base, out ? std::optional<fs::path>(*out) : std::nullopt, metric);
    }
    if (*analyze) {
      if (percentile_run) {
        std::cout << percentile_table(analyze_run_percentiles(*percentile_run));
        return kOk;
      }
      std::vector<fs::path> dirs(runs.begin(), runs.end());
      const auto table = compare_runs(dirs, metric);
      std::cout << curve_tsv(table) << '\n' << finals_tsv(table);
      return kOk;
    }
    if (*export_cmd)
      return cmd_export(checkpoint ? std::optional<fs::path>(*checkpoint) : std::nullopt,
                        ledger ? std::optional<fs::path>(*ledger) : std::nullopt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigParse:
      case ErrorCode::UnknownKey:
      case ErrorCode::InvalidArgument:
      case ErrorCode::InvalidSpec:
      case ErrorCode::Io:
        return kUsage;
      default:
        return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
