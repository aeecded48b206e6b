#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace barcodelab {

enum class ErrorCode {
  NonFinite,
  NegativeLoading,
  BadCount,
  AllocationTooLarge,
  DomainError,
  Indeterminate,
  QuadratureUnconverged,
  BadGrid,
  SingularCovariance,
  DegenerateMarginal,
  ConfigError,
  IOError,
  ValidationFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit path) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace barcodelab
