#pragma once

namespace barcodelab {

/// Standard normal CDF, H(z).
double norm_cdf(double z) noexcept;

/// Upper tail 1 - H(z), without cancellation for large z.
double norm_sf(double z) noexcept;

/// Inverse of norm_cdf on (0, 1). Throws DomainError outside the open interval.
double inv_norm_cdf(double p);

}  // namespace barcodelab
