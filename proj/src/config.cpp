#include "empg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace empg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::ConfigParse, "invalid value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"ablation", [](RunConfig& c, auto&, auto& v) { c.ablation = parse_ablation(v); }},
      {"env.kind", [](RunConfig& c, auto&, auto& v) { c.env.kind = parse_env_kind(v); }},
      {"env.length", [](RunConfig& c, auto& k, auto& v) { c.env.length = to_int<int>(k, v); }},
      {"env.width", [](RunConfig& c, auto& k, auto& v) { c.env.width = to_int<int>(k, v); }},
      {"env.height", [](RunConfig& c, auto& k, auto& v) { c.env.height = to_int<int>(k, v); }},
      {"env.depth", [](RunConfig& c, auto& k, auto& v) { c.env.depth = to_int<int>(k, v); }},
      {"env.alias_width", [](RunConfig& c, auto& k, auto& v) { c.env.alias_width = to_int<int>(k, v); }},
      {"env.horizon", [](RunConfig& c, auto& k, auto& v) { c.env.horizon = to_int<int>(k, v); }},
      {"modulation.k", [](RunConfig& c, auto& k, auto& v) { c.modulation.k = to_double(k, v); }},
      {"modulation.k_prime", [](RunConfig& c, auto& k, auto& v) { c.modulation.k_prime = to_double(k, v); }},
      {"modulation.zeta", [](RunConfig& c, auto& k, auto& v) { c.modulation.zeta = to_double(k, v); }},
      {"modulation.epsilon", [](RunConfig& c, auto& k, auto& v) { c.modulation.epsilon = to_double(k, v); }},
      {"rollout.group_size", [](RunConfig& c, auto& k, auto& v) { c.group_size = to_int<int>(k, v); }},
      {"rollout.tasks_per_batch", [](RunConfig& c, auto& k, auto& v) { c.tasks_per_batch = to_int<int>(k, v); }},
      {"train.iterations", [](RunConfig& c, auto& k, auto& v) { c.iterations = to_int<int>(k, v); }},
      {"train.learning_rate", [](RunConfig& c, auto& k, auto& v) { c.learning_rate = to_double(k, v); }},
      {"train.lr_decay", [](RunConfig& c, auto& k, auto& v) { c.lr_decay = to_double(k, v); }},
      {"train.update_rule",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "vanilla")
           c.update_rule = UpdateRule::vanilla;
         else if (v == "clipped")
           c.update_rule = UpdateRule::clipped;
         else
           bad_value(k, v);
       }},
      {"train.clip_low", [](RunConfig& c, auto& k, auto& v) { c.clip_low = to_double(k, v); }},
      {"train.clip_high", [](RunConfig& c, auto& k, auto& v) { c.clip_high = to_double(k, v); }},
      {"train.init_logit_std", [](RunConfig& c, auto& k, auto& v) { c.init_logit_std = to_double(k, v); }},
      {"train.debug_checks", [](RunConfig& c, auto& k, auto& v) { c.debug_checks = to_bool(k, v); }},
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"run.seeds",
       [](RunConfig& c, auto& k, auto& v) {
         c.seeds.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) c.seeds.push_back(to_int<std::uint64_t>(k, trim(item)));
         if (c.seeds.empty()) bad_value(k, v);
       }},
      {"run.checkpoint_every", [](RunConfig& c, auto& k, auto& v) { c.checkpoint_every = to_int<int>(k, v); }},
      {"run.ledger_every", [](RunConfig& c, auto& k, auto& v) { c.ledger_every = to_int<int>(k, v); }},
      {"run.label", [](RunConfig& c, auto&, auto& v) { c.label = v; }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  env.validate();
  modulation.validate();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigParse, msg); };
  if (group_size < 2) fail("rollout.group_size must be at least 2");
  if (tasks_per_batch < 1) fail("rollout.tasks_per_batch must be at least 1");
  if (iterations < 0) fail("train.iterations must be non-negative");
  if (!(learning_rate > 0)) fail("train.learning_rate must be positive");
  if (lr_decay < 0) fail("train.lr_decay must be non-negative");
  if (clip_low < 0 || clip_low >= 1 || clip_high < 0) fail("clip range must satisfy 0 <= clip_low < 1, clip_high >= 0");
  if (init_logit_std < 0) fail("train.init_logit_std must be non-negative");
  if (checkpoint_every < 1 || ledger_every < 1) fail("checkpoint/ledger cadence must be at least 1");
  if (seeds.empty()) fail("run.seeds must not be empty");
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigParse, "line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(content).substr(0, eq));
    auto value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::ConfigParse, "line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  auto kv = parse_key_values(text);
  if (kv.size() != 1) throw Error(ErrorCode::ConfigParse, "override must look like key=value: '" + text + "'");
  return kv.front();
}

RunConfig resolve_config(const KeyValues& entries, const KeyValues& overrides) {
  std::map<std::string, std::string> merged;
  for (const auto& source : {&entries, &overrides})
    for (const auto& [k, v] : *source) {
      if (k != "env.preset" && !setters().contains(k)) throw Error(ErrorCode::UnknownKey, "unknown key '" + k + "'");
      merged[k] = v;
    }

  RunConfig config;
  if (auto it = merged.find("env.preset"); it != merged.end()) {
    config.env_preset = it->second;
    config.env = preset(it->second);
  }
  const bool zeta_given = merged.contains("modulation.zeta");
  for (const auto& [k, v] : merged)
    if (k != "env.preset") setters().at(k)(config, k, v);
  if (!zeta_given) config.modulation.zeta = config.env.default_zeta();
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  KeyValues ov;
  for (const auto& o : overrides) ov.push_back(parse_override(o));
  return resolve_config(parse_key_values(buf.str()), ov);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream os;
  os << "# resolved configuration\n";
  os << "ablation = " << to_string(c.ablation) << '\n';
  if (!c.env_preset.empty()) os << "env.preset = " << c.env_preset << '\n';
  os << "env.kind = " << to_string(c.env.kind) << '\n';
  os << "env.length = " << c.env.length << '\n';
  os << "env.width = " << c.env.width << '\n';
  os << "env.height = " << c.env.height << '\n';
  os << "env.depth = " << c.env.depth << '\n';
  os << "env.alias_width = " << c.env.alias_width << '\n';
  os << "env.horizon = " << c.env.horizon << '\n';
  os << "modulation.k = " << format_double(c.modulation.k) << '\n';
  os << "modulation.k_prime = " << format_double(c.modulation.k_prime) << '\n';
  os << "modulation.zeta = " << format_double(c.modulation.zeta) << '\n';
  os << "modulation.epsilon = " << format_double(c.modulation.epsilon) << '\n';
  os << "rollout.group_size = " << c.group_size << '\n';
  os << "rollout.tasks_per_batch = " << c.tasks_per_batch << '\n';
  os << "train.iterations = " << c.iterations << '\n';
  os << "train.learning_rate = " << format_double(c.learning_rate) << '\n';
  os << "train.lr_decay = " << format_double(c.lr_decay) << '\n';
  os << "train.update_rule = " << (c.update_rule == UpdateRule::vanilla ? "vanilla" : "clipped") << '\n';
  os << "train.clip_low = " << format_double(c.clip_low) << '\n';
  os << "train.clip_high = " << format_double(c.clip_high) << '\n';
  os << "train.init_logit_std = " << format_double(c.init_logit_std) << '\n';
  os << "train.debug_checks = " << (c.debug_checks ? "true" : "false") << '\n';
  os << "run.seed = " << c.seed << '\n';
  os << "run.seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << '\n';
  os << "run.checkpoint_every = " << c.checkpoint_every << '\n';
  os << "run.ledger_every = " << c.ledger_every << '\n';
  if (!c.label.empty()) os << "run.label = " << c.label << '\n';
  return os.str();
}

}  // namespace empg
