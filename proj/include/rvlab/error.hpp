#pragma once

#include <stdexcept>
#include <string>

namespace rvlab {

// Every failure the library can signal, one code per contract-level error.
enum class ErrorCode {
  ReduciblePolynomial,
  NotEisenstein,
  UnsupportedEquichar,
  UnsupportedExtension,
  NotIntegral,
  PrecisionMismatch,
  NonUnitInverse,
  UnrelatedFields,
  InsufficientPrecision,
  NotDivisor,
  DepthMismatch,
  ZeroLeadingTermQuery,
  PredicateFails,
  PrecisionExhausted,
  CapExceeded,
  SyntaxError,
  SortError,
  WindowTooLarge,
  EnumerationCapExceeded,
  NeedMoreTerms,
  GuardFailed,
  SnapAmbiguous,
  UncertifiedTerm,
  NotInCatalog,
  DegenerateRegression,
  NotExistential,
  CorruptCacheEntry,
  UsageError,
  Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rvlab
