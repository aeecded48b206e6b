#include "barcodelab/normal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "barcodelab/error.hpp"

namespace barcodelab {

namespace {
constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
}

double norm_cdf(double z) noexcept { return 0.5 * std::erfc(-z * inv_sqrt2); }

double norm_sf(double z) noexcept { return 0.5 * std::erfc(z * inv_sqrt2); }

double inv_norm_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "inverse normal CDF needs p in (0, 1), got " + std::to_string(p));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace barcodelab
