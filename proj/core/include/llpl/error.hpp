#pragma once

#include <stdexcept>
#include <string>

namespace llpl {

/// Failure categories raised across the library. The CLI maps these onto
/// process exit codes.
enum class ErrorKind {
  kNonFiniteState,
  kPathExhausted,
  kBadWaypoints,
  kShapeMismatch,
  kNonFiniteLoss,
  kLogTooShort,
  kEmptyDataset,
  kEmptyMemory,
  kSpeedTooLow,
  kNumericalFailure,
  kOffPath,
  kConfig,
  kMissingArtifact,
  kMissingRun,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace llpl
