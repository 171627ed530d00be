#include "stabilikit/error.hpp"

namespace stabilikit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DegeneratePlacement: return "DegeneratePlacement";
    case ErrorCode::MissingObservation: return "MissingObservation";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InsufficientSubjects: return "InsufficientSubjects";
    case ErrorCode::StreamMisalignment: return "StreamMisalignment";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoValidFrames: return "NoValidFrames";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::ExcludedTake: return "ExcludedTake";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace stabilikit
