#pragma once

#include <stdexcept>
#include <string>

namespace polycwm {

enum class ErrorCode {
  SingularMatrix,
  AllNegInfinity,
  NonPositiveScale,
  InvalidParameters,
  LabelOutOfRange,
  ShapeMismatch,
  EmptyComponent,
  SingularDesign,
  VarianceCollapse,
  AllRestartsFailed,
  AllCellsFailed,
  LengthMismatch,
  TooFewPoints,
  HessianNotPD,
  NumericalBreakdown,
  InsufficientData,
  ParseError,
  EmptyFile,
  BadLabel,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polycwm
