#include "empg/policy.hpp"

#include <string>

namespace empg {

LogitTables zeros_like(const LogitTables& tables) {
  LogitTables out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(Matrix::Zero(t.rows(), t.cols()));
  return out;
}

double squared_norm(const LogitTables& tables) {
  double s = 0.0;
  for (const auto& t : tables) s += t.squaredNorm();
  return s;
}

bool all_finite(const LogitTables& tables) {
  for (const auto& t : tables)
    if (!t.allFinite()) return false;
  return true;
}

SoftmaxPolicy::SoftmaxPolicy(std::size_t state_count, std::vector<std::size_t> vocab_sizes)
    : state_count_(state_count) {
  if (state_count == 0 || vocab_sizes.empty())
    throw Error(ErrorCode::InvalidArgument, "policy needs at least one state and one position");
  for (std::size_t v : vocab_sizes) {
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "sub-vocabulary must be non-empty");
    tables_.push_back(Matrix::Zero(static_cast<Eigen::Index>(state_count), static_cast<Eigen::Index>(v)));
  }
}

std::size_t SoftmaxPolicy::vocab_size(std::size_t position) const {
  return static_cast<std::size_t>(tables_.at(position).cols());
}

void SoftmaxPolicy::check_state(StateId state) const {
  if (index_of(state) >= state_count_)
    throw Error(ErrorCode::UnknownState, "state " + std::to_string(index_of(state)) + " not in policy");
}

void SoftmaxPolicy::check_action(const CompositeAction& action) const {
  if (action.size() != tables_.size())
    throw Error(ErrorCode::ActionOutOfRange, "composite action has wrong length");
  for (std::size_t p = 0; p < action.size(); ++p)
    if (action[p] >= vocab_size(p))
      throw Error(ErrorCode::ActionOutOfRange, "sub-choice " + std::to_string(action[p]) + " out of range");
}

Vector SoftmaxPolicy::action_distribution(StateId state, std::size_t position) const {
  check_state(state);
  return softmax(tables_.at(position).row(index_of(state)).transpose());
}

Vector SoftmaxPolicy::score_logits(StateId state, std::uint32_t action, std::size_t position) const {
  check_state(state);
  if (action >= vocab_size(position)) throw Error(ErrorCode::ActionOutOfRange, "action out of range");
  return score_vector(action_distribution(state, position), action);
}

double SoftmaxPolicy::policy_entropy(StateId state, std::size_t position) const {
  return shannon_entropy(action_distribution(state, position));
}

std::vector<double> SoftmaxPolicy::token_entropies(StateId state) const {
  std::vector<double> out(positions());
  for (std::size_t p = 0; p < positions(); ++p) out[p] = policy_entropy(state, p);
  return out;
}

double SoftmaxPolicy::step_entropy(StateId state) const {
  const auto h = token_entropies(state);
  double s = 0.0;
  for (double v : h) s += v;
  return s / static_cast<double>(h.size());
}

double SoftmaxPolicy::log_prob(StateId state, const CompositeAction& action) const {
  check_state(state);
  check_action(action);
  double lp = 0.0;
  for (std::size_t p = 0; p < action.size(); ++p) {
    const Vector ls = log_softmax(tables_[p].row(index_of(state)).transpose());
    lp += std::max(ls[action[p]], std::log(kProbabilityFloor));
  }
  return std::min(lp, 0.0);
}

void SoftmaxPolicy::accumulate_score(StateId state, const CompositeAction& action, double weight,
                                     LogitTables& grad) const {
  check_state(state);
  check_action(action);
  for (std::size_t p = 0; p < action.size(); ++p)
    grad[p].row(index_of(state)) += weight * score_logits(state, action[p], p).transpose();
}

SampledStep SoftmaxPolicy::sample_step(StateId state, CounterRng& rng) const {
  check_state(state);
  SampledStep out;
  out.action.reserve(positions());
  out.token_entropies.reserve(positions());
  for (std::size_t p = 0; p < positions(); ++p) {
    const Vector probs = action_distribution(state, p);
    out.action.push_back(static_cast<std::uint32_t>(sample_categorical(probs, rng)));
    out.token_entropies.push_back(shannon_entropy(probs));
  }
  out.log_prob = log_prob(state, out.action);
  return out;
}

double SoftmaxPolicy::kl_to(const SoftmaxPolicy& other, StateId state) const {
  other.check_state(state);
  double kl = 0.0;
  for (std::size_t p = 0; p < positions(); ++p)
    kl += kl_divergence(action_distribution(state, p), other.action_distribution(state, p));
  return kl;
}

bool SoftmaxPolicy::operator==(const SoftmaxPolicy& other) const {
  if (state_count_ != other.state_count_ || tables_.size() != other.tables_.size()) return false;
  for (std::size_t p = 0; p < tables_.size(); ++p) {
    if (tables_[p].rows() != other.tables_[p].rows() || tables_[p].cols() != other.tables_[p].cols()) return false;
    if (tables_[p] != other.tables_[p]) return false;
  }
  return true;
}

}  // namespace empg
