#ifndef EMPG_SERIALIZATION_HPP
#define EMPG_SERIALIZATION_HPP

// Line-delimited JSON records, one object per line, each tagged with a
// "record" field.
//
// Batch:
//   {"record":"batch","trajectories":N,"groups":G}
//   {"record":"group","group_id":g,"members":[i,...]}                      x G
//   {"record":"trajectory","index":i,"task_id":..,"group_id":..,"seed":..,
//    "terminal_reward":0|1,"steps":T}                                       x N
//   {"record":"step","traj":i,"index":t,"state_id":s,"action":[..],
//    "token_entropies":[..],"old_log_prob":x}                               x T per trajectory
//
// Advantage ledger:
//   {"record":"advantage","traj":i,"step":t,"a_outcome":..,"h_step":..,
//    "h_norm":..,"g":..,"f_next":..,"a_mod":..,"a_final":..}
//   "f_next" is omitted at a trajectory's final step.
//
// Policy checkpoint:
//   {"record":"policy","states":S,"vocab":[V_1,...,V_L]}
//   {"record":"logits","state":s,"position":p,"logits":[..]}               x S*L
//
// Doubles are written in shortest round-trip form, so decode(encode(x)) == x
// bitwise.

#include "empg/core_model.hpp"
#include "empg/policy.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace empg {

std::string encode_batch(const Batch& batch);
Batch decode_batch(const std::string& text);

std::string encode_records(const std::vector<AdvantageRecord>& records);
std::vector<AdvantageRecord> decode_records(const std::string& text);

std::string encode_policy(const SoftmaxPolicy& policy);
SoftmaxPolicy decode_policy(const std::string& text);

std::string read_text(const std::filesystem::path& path);
/// Creates the file; refuses to overwrite an existing one.
void write_new_file(const std::filesystem::path& path, const std::string& text);

}  // namespace empg

#endif  // EMPG_SERIALIZATION_HPP
