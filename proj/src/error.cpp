#include "kvrand/error.hpp"

namespace kvrand {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewElements: return "TooFewElements";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::NonFiniteFunctionValue: return "NonFiniteFunctionValue";
    case ErrorCode::NoRootFound: return "NoRootFound";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DensityEvaluationError: return "DensityEvaluationError";
    case ErrorCode::AllZeroDensity: return "AllZeroDensity";
    case ErrorCode::DegenerateBracket: return "DegenerateBracket";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::BadEdges: return "BadEdges";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroExpected: return "ZeroExpected";
    case ErrorCode::BadArtifact: return "BadArtifact";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace kvrand
