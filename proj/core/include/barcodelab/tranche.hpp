#pragma once

#include <vector>

#include "barcodelab/model.hpp"
#include "barcodelab/quadrature.hpp"

namespace barcodelab {

/// Step-payoff tranches F_k(X) = theta(X - E[X] - k). Thresholds are offsets
/// from the pooled mean n*mu, so default probabilities do not depend on mu.
struct TrancheSpec {
  std::vector<double> thresholds;  // strictly increasing
  std::vector<double> weights;     // f_j > 0, one per threshold
  std::vector<double> target_default_probs;  // optional; empty or one per threshold

  /// Sup-norm gap between the weighted staircase and the clamped pooled
  /// return; equals the grid step for grids from build_tranche_grid, 0 if unknown.
  double reconstruction_bound = 0.0;
};

/// Throws BadGrid on empty, unordered or mismatched thresholds/weights.
void validate_spec(const TrancheSpec& spec);

/// p_d^k = P(X < n mu + k) = H(k / sqrt(V(X))). Clamped to
/// [DBL_MIN, 1 - eps/2] so far tails stay strictly inside (0, 1).
double default_prob(const ModelParams& params, double k);

/// Inverse of default_prob. Throws DomainError unless 0 < p_d < 1.
double threshold_from_default_prob(const ModelParams& params, double p_d);

/// p_d^k(y) = P(X <= n mu + k | Y = y) = H((k - J y) / sqrt(V(X|Y))).
double conditional_default_prob(const ModelParams& params, double k, double y);

/// Where p_d^k(y) switches from 1 to 0, in units of the standardized barcode
/// z = y / sqrt(V(Y)). Width is +inf when J = 0.
SharpFeature default_switch(const ModelParams& params, double k);

/// I(F_k, Y), nats, by Gauss-Hermite quadrature over Y (graded fallback
/// around default_switch when p_d^k(y) is nearly a step).
/// Throws DomainError when p_d^k is within 1e-12 of 0 or 1.
double mi_tranche(const ModelParams& params, double k, const QuadratureSettings& q = {});

/// Uniform decomposition grid: thresholds k_min + j dk, j = 0..m-1,
/// weights dk = (k_max - k_min) / m. Throws BadGrid unless k_min < k_max, m >= 2.
TrancheSpec build_tranche_grid(const ModelParams& params, double k_min, double k_max, int m);

/// sum_j f_j theta(offset - k_j), offset = X - n mu.
double staircase_payoff(const TrancheSpec& spec, double offset);

/// Binary entropy in nats with 0 ln 0 = 0.
double binary_entropy(double p) noexcept;

}  // namespace barcodelab
