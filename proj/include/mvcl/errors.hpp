#pragma once

#include <stdexcept>
#include <string>

namespace mvcl {

// Every failure the library can report. CLI exit codes are derived from the
// code (usage/config errors vs. malformed input files vs. numerical failure).
enum class ErrorCode {
  InvalidShape,
  ZeroRow,
  NonFinite,
  NotUnitNorm,
  UnknownLoss,
  WrongViewCount,
  TooFewInstances,
  BadParameter,
  OutOfDomain,
  NegativeConcentration,
  BadHeader,
  ShapeMismatch,
  TooFewRows,
  TooFewSamples,
  ZeroProjection,
  Diverged,
  SvdFailure,
  SizeGuard,
  IoFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvcl
