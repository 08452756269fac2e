#include "dscv/error.hpp"

namespace dscv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ZeroMeanDisparity: return "ZeroMeanDisparity";
    case ErrorCode::HypothesisMismatch: return "HypothesisMismatch";
    case ErrorCode::WeightDimMismatch: return "WeightDimMismatch";
    case ErrorCode::DegenerateScene: return "DegenerateScene";
    case ErrorCode::NoValidPixels: return "NoValidPixels";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

bool is_io_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::BadMagic:
    case ErrorCode::BadHeader:
    case ErrorCode::TruncatedFile:
    case ErrorCode::DimensionOverflow:
    case ErrorCode::VersionMismatch:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dscv
