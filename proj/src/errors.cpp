#include "ruinlab/errors.hpp"

namespace ruinlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DivergentTailIntegral: return "DivergentTailIntegral";
    case ErrorCode::JumpBelowMinusOne: return "JumpBelowMinusOne";
    case ErrorCode::RngExhausted: return "RngExhausted";
    case ErrorCode::Inapplicable: return "Inapplicable";
    case ErrorCode::DivergentMgf: return "DivergentMgf";
    case ErrorCode::RootAtDomainBoundary: return "RootAtDomainBoundary";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::HorizonInconclusive: return "HorizonInconclusive";
    case ErrorCode::TailIntegralDiverges: return "TailIntegralDiverges";
    case ErrorCode::InfiniteHorizonDivergent: return "InfiniteHorizonDivergent";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::MomentUnavailable: return "MomentUnavailable";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
  }
  return "Unknown";
}

}  // namespace ruinlab
