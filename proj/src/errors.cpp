#include "mvcl/errors.hpp"

namespace mvcl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotUnitNorm: return "NotUnitNorm";
    case ErrorCode::UnknownLoss: return "UnknownLoss";
    case ErrorCode::WrongViewCount: return "WrongViewCount";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NegativeConcentration: return "NegativeConcentration";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ZeroProjection: return "ZeroProjection";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::SvdFailure: return "SvdFailure";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

}  // namespace mvcl
