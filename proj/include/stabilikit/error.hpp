#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stabilikit {

enum class ErrorCode {
  DegenerateInput,
  DegenerateGeometry,
  DegeneratePlacement,
  MissingObservation,
  FrameMismatch,
  EmptyField,
  ShapeMismatch,
  EmptyDataset,
  NonFiniteLoss,
  InsufficientSubjects,
  StreamMisalignment,
  SeriesTooShort,
  EmptyInput,
  ZeroVariance,
  LengthMismatch,
  NoValidFrames,
  InvalidProgram,
  InvalidArgument,
  ParseError,
  AlignmentError,
  ExcludedTake,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception type thrown by every stabilikit operation. The code is stable and
/// machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stabilikit
