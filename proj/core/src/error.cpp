#include "barcodelab/error.hpp"

namespace barcodelab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NegativeLoading: return "NegativeLoading";
    case ErrorCode::BadCount: return "BadCount";
    case ErrorCode::AllocationTooLarge: return "AllocationTooLarge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Indeterminate: return "Indeterminate";
    case ErrorCode::QuadratureUnconverged: return "QuadratureUnconverged";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DegenerateMarginal: return "DegenerateMarginal";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
  }
  return "Unknown";
}

}  // namespace barcodelab
