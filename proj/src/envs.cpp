#include "empg/envs.hpp"

#include "empg/rng.hpp"

#include <sstream>

namespace empg {

namespace {

enum Direction : std::uint32_t { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

StateId key_door_observation(const EnvSpec& spec, const EnvState& s) {
  const auto cell = static_cast<std::uint32_t>(s.y * spec.width + s.x);
  return StateId{(cell * 2u + (s.has_key ? 1u : 0u)) * 2u + (s.door_open ? 1u : 0u)};
}

StateId fork_observation(const EnvSpec& spec, const EnvState& s) {
  if (s.corridor < 0) return StateId{0};
  const int base = s.corridor == 0 ? 1 : 1 + spec.depth;
  return StateId{static_cast<std::uint32_t>(base + s.x)};
}

void finish(EnvState& s, int reward) {
  s.done = true;
  s.reward = reward;
}

void step_chain(const EnvSpec& spec, EnvState& s, const CompositeAction& a) {
  if (a[0] == 0)
    s.x = std::min(s.x + 1, spec.length - 1);
  else
    s.x = std::max(s.x - 1, 0);
  s.observation = StateId{static_cast<std::uint32_t>(s.x)};
  if (s.x == spec.length - 1) finish(s, 1);
}

void step_key_door(const EnvSpec& spec, EnvState& s, const CompositeAction& a) {
  static constexpr int dx[] = {0, 1, 0, -1};
  static constexpr int dy[] = {-1, 0, 1, 0};
  const int goal_x = spec.width - 1, goal_y = spec.height - 1;
  const int nx = s.x + dx[a[1]], ny = s.y + dy[a[1]];
  const bool in_grid = nx >= 0 && nx < spec.width && ny >= 0 && ny < spec.height;
  const bool towards_goal = nx == goal_x && ny == goal_y;

  if (a[0] == 0) {
    if (in_grid && (!towards_goal || s.door_open)) {
      s.x = nx;
      s.y = ny;
    }
    if (s.x == goal_x && s.y == goal_y) finish(s, 1);
  } else {
    if (towards_goal && !s.door_open) {
      if (!s.has_key) {
        finish(s, 0);
      } else {
        s.door_open = true;
      }
    } else if (s.x == spec.width - 1 && s.y == 0 && !s.has_key) {
      s.has_key = true;
    }
  }
  s.observation = key_door_observation(spec, s);
}

void step_fork(const EnvSpec& spec, EnvState& s, const CompositeAction& a) {
  if (s.corridor < 0) {
    s.corridor = a[0] == 0 ? 0 : 1;
    s.x = 0;
  } else {
    const auto code = s.corridor == 0 ? fork_code_a(spec, s.x) : fork_code_b(spec, s, s.x);
    if (a == code) {
      ++s.x;
      if (s.x == spec.depth) {
        s.x = spec.depth - 1;
        finish(s, 1);
      }
    }
  }
  s.observation = fork_observation(spec, s);
}

}  // namespace

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::chain_maze: return "chain_maze";
    case EnvKind::key_door: return "key_door";
    case EnvKind::ambiguity_fork: return "ambiguity_fork";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view text) {
  if (text == "chain_maze") return EnvKind::chain_maze;
  if (text == "key_door") return EnvKind::key_door;
  if (text == "ambiguity_fork") return EnvKind::ambiguity_fork;
  throw Error(ErrorCode::InvalidSpec, "unknown environment kind '" + std::string(text) + "'");
}

std::vector<std::size_t> EnvSpec::vocab_sizes() const {
  switch (kind) {
    case EnvKind::chain_maze: return {2};
    case EnvKind::key_door: return {2, 4};
    case EnvKind::ambiguity_fork: return {2, static_cast<std::size_t>(alias_width)};
  }
  return {};
}

std::size_t EnvSpec::observation_count() const {
  switch (kind) {
    case EnvKind::chain_maze: return static_cast<std::size_t>(length);
    case EnvKind::key_door: return static_cast<std::size_t>(width * height * 4);
    case EnvKind::ambiguity_fork: return static_cast<std::size_t>(1 + 2 * depth);
  }
  return 0;
}

int EnvSpec::shortest_solution() const {
  switch (kind) {
    case EnvKind::chain_maze: return length - 1;
    case EnvKind::key_door: return width + height;
    case EnvKind::ambiguity_fork: return depth + 1;
  }
  return 0;
}

void EnvSpec::validate() const {
  switch (kind) {
    case EnvKind::chain_maze:
      if (length < 2) throw Error(ErrorCode::InvalidSpec, "chain_maze needs length >= 2");
      break;
    case EnvKind::key_door:
      if (width < 2 || height < 2) throw Error(ErrorCode::InvalidSpec, "key_door needs a grid of at least 2x2");
      break;
    case EnvKind::ambiguity_fork:
      if (depth < 1 || alias_width < 2)
        throw Error(ErrorCode::InvalidSpec, "ambiguity_fork needs depth >= 1 and alias_width >= 2");
      break;
  }
  if (horizon < shortest_solution())
    throw Error(ErrorCode::InvalidSpec, "horizon " + std::to_string(horizon) + " is shorter than the shortest solution " +
                                            std::to_string(shortest_solution()));
}

std::string EnvSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind) << '(';
  switch (kind) {
    case EnvKind::chain_maze: os << length; break;
    case EnvKind::key_door: os << width << ", " << height; break;
    case EnvKind::ambiguity_fork: os << depth << ", " << alias_width; break;
  }
  os << ", " << horizon << ')';
  return os.str();
}

EnvSpec preset(std::string_view name) {
  EnvSpec spec;
  if (name == "chain8") {
    spec.kind = EnvKind::chain_maze;
    spec.length = 8;
    spec.horizon = 16;
  } else if (name == "keydoor5x5") {
    spec.kind = EnvKind::key_door;
    spec.width = 5;
    spec.height = 5;
    spec.horizon = 24;
  } else if (name == "fork3x3") {
    spec.kind = EnvKind::ambiguity_fork;
    spec.depth = 3;
    spec.alias_width = 3;
    spec.horizon = 12;
  } else {
    throw Error(ErrorCode::InvalidSpec, "unknown preset '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> preset_names() { return {"chain8", "keydoor5x5", "fork3x3"}; }

EnvState reset(const EnvSpec& spec, std::uint64_t seed) {
  spec.validate();
  EnvState s;
  if (spec.kind == EnvKind::key_door) s.observation = key_door_observation(spec, s);
  if (spec.kind == EnvKind::ambiguity_fork) {
    CounterRng rng(derive_seed({seed, 0xF0u}));
    s.hidden.resize(static_cast<std::size_t>(spec.depth));
    for (auto& h : s.hidden) h = static_cast<std::uint32_t>(uniform01(rng) * spec.alias_width);
    s.observation = fork_observation(spec, s);
  }
  return s;
}

StepResult step(const EnvSpec& spec, const EnvState& state, const CompositeAction& action) {
  if (state.done) throw Error(ErrorCode::SteppedAfterDone, "episode already finished");
  const auto vocab = spec.vocab_sizes();
  if (action.size() != vocab.size()) throw Error(ErrorCode::ActionOutOfRange, "composite action has wrong length");
  for (std::size_t p = 0; p < action.size(); ++p)
    if (action[p] >= vocab[p]) throw Error(ErrorCode::ActionOutOfRange, "sub-choice out of range");

  EnvState next = state;
  switch (spec.kind) {
    case EnvKind::chain_maze: step_chain(spec, next, action); break;
    case EnvKind::key_door: step_key_door(spec, next, action); break;
    case EnvKind::ambiguity_fork: step_fork(spec, next, action); break;
  }
  ++next.step_count;
  if (!next.done && next.step_count >= spec.horizon) finish(next, 0);
  return {next, next.done};
}

int terminal_reward(const EnvState& state) {
  if (!state.done) throw Error(ErrorCode::NotTerminal, "episode still running");
  return state.reward;
}

CompositeAction fork_code_a(const EnvSpec& spec, int position) {
  return {static_cast<std::uint32_t>(position % 2), static_cast<std::uint32_t>(position % spec.alias_width)};
}

CompositeAction fork_code_b(const EnvSpec& spec, const EnvState& state, int position) {
  (void)spec;
  return {static_cast<std::uint32_t>((position + 1) % 2), state.hidden.at(static_cast<std::size_t>(position))};
}

std::vector<CompositeAction> all_actions(const EnvSpec& spec) {
  std::vector<CompositeAction> out{{}};
  for (std::size_t v : spec.vocab_sizes()) {
    std::vector<CompositeAction> next;
    for (const auto& prefix : out)
      for (std::uint32_t c = 0; c < v; ++c) {
        auto a = prefix;
        a.push_back(c);
        next.push_back(std::move(a));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace empg
