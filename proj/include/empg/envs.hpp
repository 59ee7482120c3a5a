#ifndef EMPG_ENVS_HPP
#define EMPG_ENVS_HPP

// Small long-horizon environments with a single binary reward at episode end.
//
//   chain_maze(N, horizon)      L=1, actions {forward, back}; goal at N-1.
//   key_door(w, h, horizon)     L=2, verb {move, use} x direction {N, E, S, W}.
//                               Key at (w-1, 0), locked goal at (w-1, h-1).
//                               "use" on the key cell picks up the key; "use"
//                               towards the goal opens the door, and opening
//                               it without the key ends the episode with 0.
//   ambiguity_fork(D, W, hor.)  L=2, verb {0, 1} x argument {0..W-1}.
//                               From the fork entry, verb 0 enters corridor A,
//                               verb 1 corridor B. Each corridor has D gates.
//                               A's gates have fixed codes and unique
//                               observations. B's gate p needs the hidden
//                               argument drawn at reset; all W variants of a
//                               gate share one observation. A wrong code
//                               leaves the agent in place.

#include "empg/core_model.hpp"
#include "empg/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace empg {

enum class EnvKind { chain_maze, key_door, ambiguity_fork };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view text);

struct EnvSpec {
  EnvKind kind = EnvKind::chain_maze;
  int length = 8;       // chain_maze
  int width = 5;        // key_door
  int height = 5;       // key_door
  int depth = 3;        // ambiguity_fork
  int alias_width = 3;  // ambiguity_fork
  int horizon = 16;

  std::size_t sub_token_length() const { return kind == EnvKind::chain_maze ? 1 : 2; }
  std::vector<std::size_t> vocab_sizes() const;
  std::size_t observation_count() const;
  int shortest_solution() const;
  /// Clarity-bonus weight used when a config leaves it unset.
  double default_zeta() const { return kind == EnvKind::ambiguity_fork ? 0.1 : 0.05; }

  void validate() const;
  std::string describe() const;

  bool operator==(const EnvSpec&) const = default;
};

/// Named presets: chain8, keydoor5x5, fork3x3.
EnvSpec preset(std::string_view name);
std::vector<std::string> preset_names();

struct EnvState {
  StateId observation{};
  bool done = false;
  int step_count = 0;
  int reward = 0;

  // Underlying (partly hidden) state.
  int x = 0;
  int y = 0;
  bool has_key = false;
  bool door_open = false;
  int corridor = -1;  // fork: -1 at entry, 0 = A, 1 = B
  std::vector<std::uint32_t> hidden;

  bool operator==(const EnvState&) const = default;
};

EnvState reset(const EnvSpec& spec, std::uint64_t seed);

struct StepResult {
  EnvState state;
  bool done = false;
};

StepResult step(const EnvSpec& spec, const EnvState& state, const CompositeAction& action);

/// Binary outcome of a finished episode.
int terminal_reward(const EnvState& state);

/// Fixed gate code of corridor A at position p.
CompositeAction fork_code_a(const EnvSpec& spec, int position);
/// Gate code of corridor B at position p for the given hidden variants.
CompositeAction fork_code_b(const EnvSpec& spec, const EnvState& state, int position);

/// Every composite action of the spec, in lexicographic order.
std::vector<CompositeAction> all_actions(const EnvSpec& spec);

}  // namespace empg

#endif  // EMPG_ENVS_HPP
