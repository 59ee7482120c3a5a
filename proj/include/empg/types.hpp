#ifndef EMPG_TYPES_HPP
#define EMPG_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace empg {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Observation identifier a policy indexes its logit tables with.
enum class StateId : std::uint32_t {};

constexpr std::uint32_t index_of(StateId s) { return static_cast<std::uint32_t>(s); }

enum class ErrorCode {
  EmptyBatch,
  SingletonGroup,
  RewardOutOfRange,
  EmptyTrajectory,
  HorizonExceeded,
  InvalidStep,
  UnknownState,
  ActionOutOfRange,
  IndexOutOfRange,
  EmptyStep,
  GroupTooSmall,
  EntropyPipelineMissing,
  PipelineNotRun,
  AllGroupsFiltered,
  NonFiniteGradient,
  InvalidSpec,
  SteppedAfterDone,
  NotTerminal,
  EnvFailure,
  EmptyLedger,
  MismatchedGrids,
  ConfigParse,
  UnknownKey,
  InvalidArgument,
  IdentityViolated,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace empg

#endif  // EMPG_TYPES_HPP
