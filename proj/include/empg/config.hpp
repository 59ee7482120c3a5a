#ifndef EMPG_CONFIG_HPP
#define EMPG_CONFIG_HPP

// Flat `section.key = value` configuration. Blank lines and lines starting
// with '#' are ignored. Unknown keys are errors.
//
//   ablation                  baseline | scaling_only | bonus_only | full
//   env.preset                chain8 | keydoor5x5 | fork3x3 (applied before env.*)
//   env.kind                  chain_maze | key_door | ambiguity_fork
//   env.length env.width env.height env.depth env.alias_width env.horizon
//   modulation.k modulation.k_prime modulation.zeta modulation.epsilon
//                             zeta defaults to 0.05 (chain/key-door) or 0.1 (fork)
//   rollout.group_size rollout.tasks_per_batch
//   train.iterations train.learning_rate train.lr_decay
//   train.update_rule         vanilla | clipped
//   train.clip_low train.clip_high train.init_logit_std train.debug_checks
//   run.seed run.seeds        seeds is a comma-separated list (used by ablate)
//   run.checkpoint_every run.ledger_every run.label

#include "empg/core_model.hpp"
#include "empg/envs.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace empg {

struct RunConfig {
  Ablation ablation = Ablation::full;
  std::string env_preset;
  EnvSpec env;
  ModulationParams modulation;
  int group_size = 8;
  int tasks_per_batch = 8;
  int iterations = 300;
  double learning_rate = 0.5;
  double lr_decay = 0.0;  // lr_t = learning_rate / (1 + lr_decay * t)
  UpdateRule update_rule = UpdateRule::vanilla;
  double clip_low = 0.2;
  double clip_high = 0.28;
  double init_logit_std = 0.0;
  bool debug_checks = false;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0};
  int checkpoint_every = 50;
  int ledger_every = 1;
  std::string label;

  /// Undiscounted returns only.
  static constexpr double gamma = 1.0;

  double learning_rate_at(int iteration) const { return learning_rate / (1.0 + lr_decay * iteration); }
  std::string display_label() const { return label.empty() ? std::string(to_string(ablation)) : label; }

  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits config text into ordered key/value pairs.
KeyValues parse_key_values(const std::string& text);

/// Parses one `key=value` override.
std::pair<std::string, std::string> parse_override(const std::string& text);

/// Resolves a config from file entries followed by overrides.
RunConfig resolve_config(const KeyValues& entries, const KeyValues& overrides = {});

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Fully resolved config text; feeding it back through resolve_config
/// reproduces the same RunConfig.
std::string echo_config(const RunConfig& config);

}  // namespace empg

#endif  // EMPG_CONFIG_HPP
