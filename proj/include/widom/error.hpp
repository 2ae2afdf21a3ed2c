#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace widom {

// The names and the exit codes are part of the CLI contract; append only.
enum class ErrorKind {
  ConfigInvalid,
  InvalidArgument,
  CutoffTooLarge,
  SingularSymbol,
  BlockSizeMismatch,
  GridTooCoarse,
  FitDegenerate,
  TruncationTooSmall,
  NumericallySingularSection,
  EigFailure,
  NonZeroWinding,
  NonCanonical,
  IllConditionedSection,
  SpectrumTooClose,
  NoConvergence,
  ContourTooTight,
  FNotAnalyticAtSample,
  IoError,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Process exit code used by the CLI for an error of this kind.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace widom
