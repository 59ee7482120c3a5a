#include "empg/serialization.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace empg {

using json = nlohmann::json;

namespace {

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigParse, std::string("malformed record line: ") + e.what());
    }
    fn(j);
  }
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorCode::ConfigParse, std::string("record is missing field '") + name + "'");
  return *it;
}

}  // namespace

std::string encode_batch(const Batch& batch) {
  std::ostringstream os;
  os << json{{"record", "batch"}, {"trajectories", batch.trajectories.size()}, {"groups", batch.groups.size()}}.dump()
     << '\n';
  for (const auto& [gid, members] : batch.groups)
    os << json{{"record", "group"}, {"group_id", gid}, {"members", members}}.dump() << '\n';
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
    const auto& t = batch.trajectories[i];
    os << json{{"record", "trajectory"}, {"index", i},          {"task_id", t.task_id},
               {"group_id", t.group_id}, {"seed", t.seed},       {"terminal_reward", t.terminal_reward},
               {"steps", t.steps.size()}}
              .dump()
       << '\n';
    for (std::size_t s = 0; s < t.steps.size(); ++s) {
      const auto& st = t.steps[s];
      os << json{{"record", "step"},
                 {"traj", i},
                 {"index", s},
                 {"state_id", index_of(st.state_id)},
                 {"action", st.action},
                 {"token_entropies", st.token_entropies},
                 {"old_log_prob", st.old_log_prob}}
                .dump()
         << '\n';
    }
  }
  return os.str();
}

Batch decode_batch(const std::string& text) {
  Batch batch;
  for_each_line(text, [&](const json& j) {
    const auto kind = field(j, "record").get<std::string>();
    if (kind == "batch") {
      batch.trajectories.reserve(field(j, "trajectories").get<std::size_t>());
    } else if (kind == "group") {
      batch.groups[field(j, "group_id").get<std::uint64_t>()] = field(j, "members").get<std::vector<std::size_t>>();
    } else if (kind == "trajectory") {
      if (field(j, "index").get<std::size_t>() != batch.trajectories.size())
        throw Error(ErrorCode::ConfigParse, "trajectory records out of order");
      Trajectory t;
      t.task_id = field(j, "task_id").get<std::uint64_t>();
      t.group_id = field(j, "group_id").get<std::uint64_t>();
      t.seed = field(j, "seed").get<std::uint64_t>();
      t.terminal_reward = field(j, "terminal_reward").get<int>();
      t.steps.reserve(field(j, "steps").get<std::size_t>());
      batch.trajectories.push_back(std::move(t));
    } else if (kind == "step") {
      const auto traj = field(j, "traj").get<std::size_t>();
      if (traj + 1 != batch.trajectories.size()) throw Error(ErrorCode::ConfigParse, "step record out of order");
      auto& steps = batch.trajectories.back().steps;
      if (field(j, "index").get<std::size_t>() != steps.size())
        throw Error(ErrorCode::ConfigParse, "step records out of order");
      Step st;
      st.state_id = StateId{field(j, "state_id").get<std::uint32_t>()};
      st.action = field(j, "action").get<CompositeAction>();
      st.token_entropies = field(j, "token_entropies").get<std::vector<double>>();
      st.old_log_prob = field(j, "old_log_prob").get<double>();
      steps.push_back(std::move(st));
    } else {
      throw Error(ErrorCode::ConfigParse, "unexpected record kind '" + kind + "' in batch");
    }
  });
  return batch;
}

std::string encode_records(const std::vector<AdvantageRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records) {
    json j{{"record", "advantage"}, {"traj", r.traj_index}, {"step", r.step_index}, {"a_outcome", r.a_outcome},
           {"h_step", r.h_step},    {"h_norm", r.h_norm},   {"g", r.g}};
    if (r.f_next) j["f_next"] = *r.f_next;
    j["a_mod"] = r.a_mod;
    j["a_final"] = r.a_final;
    os << j.dump() << '\n';
  }
  return os.str();
}

std::vector<AdvantageRecord> decode_records(const std::string& text) {
  std::vector<AdvantageRecord> out;
  for_each_line(text, [&](const json& j) {
    if (field(j, "record").get<std::string>() != "advantage")
      throw Error(ErrorCode::ConfigParse, "expected an advantage record");
    AdvantageRecord r;
    r.traj_index = field(j, "traj").get<std::size_t>();
    r.step_index = field(j, "step").get<std::size_t>();
    r.a_outcome = field(j, "a_outcome").get<double>();
    r.h_step = field(j, "h_step").get<double>();
    r.h_norm = field(j, "h_norm").get<double>();
    r.g = field(j, "g").get<double>();
    if (j.contains("f_next")) r.f_next = j["f_next"].get<double>();
    r.a_mod = field(j, "a_mod").get<double>();
    r.a_final = field(j, "a_final").get<double>();
    out.push_back(r);
  });
  return out;
}

std::string encode_policy(const SoftmaxPolicy& policy) {
  std::ostringstream os;
  std::vector<std::size_t> vocab;
  for (std::size_t p = 0; p < policy.positions(); ++p) vocab.push_back(policy.vocab_size(p));
  os << json{{"record", "policy"}, {"states", policy.state_count()}, {"vocab", vocab}}.dump() << '\n';
  for (std::size_t s = 0; s < policy.state_count(); ++s)
    for (std::size_t p = 0; p < policy.positions(); ++p) {
      const auto& row = policy.logits(p).row(static_cast<Eigen::Index>(s));
      os << json{{"record", "logits"},
                 {"state", s},
                 {"position", p},
                 {"logits", std::vector<double>(row.data(), row.data() + row.size())}}
                .dump()
         << '\n';
    }
  return os.str();
}

SoftmaxPolicy decode_policy(const std::string& text) {
  SoftmaxPolicy policy;
  bool have_header = false;
  for_each_line(text, [&](const json& j) {
    const auto kind = field(j, "record").get<std::string>();
    if (kind == "policy") {
      policy = SoftmaxPolicy(field(j, "states").get<std::size_t>(), field(j, "vocab").get<std::vector<std::size_t>>());
      have_header = true;
    } else if (kind == "logits") {
      if (!have_header) throw Error(ErrorCode::ConfigParse, "logits before policy header");
      const auto s = field(j, "state").get<std::size_t>();
      const auto p = field(j, "position").get<std::size_t>();
      const auto values = field(j, "logits").get<std::vector<double>>();
      if (s >= policy.state_count() || p >= policy.positions() || values.size() != policy.vocab_size(p))
        throw Error(ErrorCode::ConfigParse, "logit record does not fit the policy shape");
      policy.logits(p).row(static_cast<Eigen::Index>(s)) =
          Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } else {
      throw Error(ErrorCode::ConfigParse, "unexpected record kind '" + kind + "' in checkpoint");
    }
  });
  if (!have_header) throw Error(ErrorCode::ConfigParse, "checkpoint has no policy header");
  return policy;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_new_file(const std::filesystem::path& path, const std::string& text) {
  if (std::filesystem::exists(path)) throw Error(ErrorCode::Io, "refusing to overwrite " + path.string());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace empg
