#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dscv {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveDepth,
  ShapeMismatch,
  InvalidTarget,
  InvalidRange,
  ZeroMeanDisparity,
  HypothesisMismatch,
  WeightDimMismatch,
  DegenerateScene,
  NoValidPixels,
  // file-format and filesystem failures
  IoError,
  BadMagic,
  BadHeader,
  TruncatedFile,
  DimensionOverflow,
  VersionMismatch,
};

std::string_view to_string(ErrorCode code);

/// True for codes that describe a file or stream problem rather than bad input values.
bool is_io_error(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace dscv
