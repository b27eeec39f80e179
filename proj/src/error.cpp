#include "polycwm/error.hpp"

namespace polycwm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::AllNegInfinity: return "AllNegInfinity";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyComponent: return "EmptyComponent";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::VarianceCollapse: return "VarianceCollapse";
    case ErrorCode::AllRestartsFailed: return "AllRestartsFailed";
    case ErrorCode::AllCellsFailed: return "AllCellsFailed";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::HessianNotPD: return "HessianNotPD";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace polycwm
