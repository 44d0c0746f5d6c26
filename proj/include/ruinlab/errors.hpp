#pragma once

#include <stdexcept>
#include <string>

namespace ruinlab {

enum class ErrorCode {
  InvalidSpec,
  DivergentTailIntegral,
  JumpBelowMinusOne,
  RngExhausted,
  Inapplicable,
  DivergentMgf,
  RootAtDomainBoundary,
  QuadratureFailure,
  HorizonInconclusive,
  TailIntegralDiverges,
  InfiniteHorizonDivergent,
  AlphaOutOfRange,
  MomentUnavailable,
  InsufficientTail,
  IoFailure,
  SchemaMismatch,
  CorruptFile,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ruinlab
