#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace barcodelab {

struct QuadratureSettings {
  int node_count = 201;                        // odd, >= 11
  std::size_t mc_fallback_samples = 1'000'000;  // oracle-side sample size
  int max_doublings = 3;
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-15;  // floor for quantities that vanish
};

/// Throws DomainError unless node_count is odd and >= 11.
void validate_settings(const QuadratureSettings& settings);

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0, 1): weights sum to one.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are built once per node count and cached for the process lifetime.
const GaussHermiteRule& gauss_hermite_rule(int node_count);

/// Fixed-order pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

struct QuadratureResult {
  std::vector<double> values;
  int node_count = 0;  // rule that produced `values`
};

using VectorIntegrand = std::function<void(double z, std::span<double> out)>;

/// A transition of the integrand around `center` over roughly `width` in z
/// (e.g. a normal CDF of (center - z) / width).
struct SharpFeature {
  double center = 0.0;
  double width = 1.0;
};

/// E[f(Z)] for a vector-valued f, Z standard normal. Starts at
/// settings.node_count and refines (n -> 2n - 1) until every component is
/// stable to relative_tolerance. If that fails and `features` is non-empty,
/// retries with composite Gauss-Legendre on [-38, 38] graded around each
/// feature, halving every panel until stable. Throws QuadratureUnconverged
/// when neither route settles. node_count reports the evaluations used.
QuadratureResult expect_standard_normal(std::size_t dimension, const VectorIntegrand& f,
                                        const QuadratureSettings& settings = {},
                                        std::span<const SharpFeature> features = {});

double expect_standard_normal(const std::function<double(double)>& f,
                              const QuadratureSettings& settings = {},
                              std::span<const SharpFeature> features = {});

}  // namespace barcodelab
