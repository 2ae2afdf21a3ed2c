#include "widom/error.hpp"

namespace widom {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CutoffTooLarge: return "CutoffTooLarge";
    case ErrorKind::SingularSymbol: return "SingularSymbol";
    case ErrorKind::BlockSizeMismatch: return "BlockSizeMismatch";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::FitDegenerate: return "FitDegenerate";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::NumericallySingularSection: return "NumericallySingularSection";
    case ErrorKind::EigFailure: return "EigFailure";
    case ErrorKind::NonZeroWinding: return "NonZeroWinding";
    case ErrorKind::NonCanonical: return "NonCanonical";
    case ErrorKind::IllConditionedSection: return "IllConditionedSection";
    case ErrorKind::SpectrumTooClose: return "SpectrumTooClose";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ContourTooTight: return "ContourTooTight";
    case ErrorKind::FNotAnalyticAtSample: return "FNotAnalyticAtSample";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  // ConfigInvalid -> 2, then one code per kind in declaration order.
  return 2 + static_cast<int>(kind);
}

}  // namespace widom
