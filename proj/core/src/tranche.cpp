#include "barcodelab/tranche.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "barcodelab/error.hpp"
#include "barcodelab/normal.hpp"

namespace barcodelab {

void validate_spec(const TrancheSpec& spec) {
  if (spec.thresholds.empty()) {
    throw Error(ErrorCode::BadGrid, "tranche spec has no thresholds");
  }
  if (spec.weights.size() != spec.thresholds.size()) {
    throw Error(ErrorCode::BadGrid, "tranche spec needs one weight per threshold");
  }
  if (!spec.target_default_probs.empty() &&
      spec.target_default_probs.size() != spec.thresholds.size()) {
    throw Error(ErrorCode::BadGrid, "target default probabilities must match thresholds");
  }
  for (std::size_t j = 0; j < spec.thresholds.size(); ++j) {
    if (!std::isfinite(spec.thresholds[j]) || !std::isfinite(spec.weights[j])) {
      throw Error(ErrorCode::BadGrid, "tranche thresholds and weights must be finite");
    }
    if (!(spec.weights[j] > 0.0)) {
      throw Error(ErrorCode::BadGrid, "tranche weights must be positive");
    }
    if (j > 0 && !(spec.thresholds[j] > spec.thresholds[j - 1])) {
      throw Error(ErrorCode::BadGrid, "tranche thresholds must be strictly increasing");
    }
  }
}

double default_prob(const ModelParams& params, double k) {
  const Moments m = moments(params);
  const double p = norm_cdf(k / std::sqrt(m.portfolio_variance));
  constexpr double lowest = std::numeric_limits<double>::min();
  const double highest = std::nextafter(1.0, 0.0);
  return std::clamp(p, lowest, highest);
}

double threshold_from_default_prob(const ModelParams& params, double p_d) {
  const Moments m = moments(params);
  return inv_norm_cdf(p_d) * std::sqrt(m.portfolio_variance);
}

double conditional_default_prob(const ModelParams& params, double k, double y) {
  const Moments m = moments(params);
  return norm_cdf((k - params.coupling * y) / std::sqrt(m.conditional_portfolio_variance));
}

double binary_entropy(double p) noexcept {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

SharpFeature default_switch(const ModelParams& params, double k) {
  const Moments m = moments(params);
  const double slope = params.coupling * std::sqrt(m.barcode_variance);
  if (slope == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
  return {k / slope, std::sqrt(m.conditional_portfolio_variance) / slope};
}

double mi_tranche(const ModelParams& params, double k, const QuadratureSettings& q) {
  const Moments m = moments(params);
  const double scale_x = std::sqrt(m.portfolio_variance);
  const double p_bar = norm_cdf(k / scale_x);
  const double q_bar = norm_sf(k / scale_x);
  constexpr double eps = 1e-12;
  if (!(p_bar > eps && q_bar > eps)) {
    throw Error(ErrorCode::DomainError,
                "tranche default probability " + std::to_string(p_bar) +
                    " is within 1e-12 of 0 or 1");
  }
  const double log_p_bar = std::log(p_bar);
  const double log_q_bar = std::log(q_bar);
  const double scale_y = std::sqrt(m.barcode_variance);
  const double scale_cond = std::sqrt(m.conditional_portfolio_variance);
  const double coupling = params.coupling;

  // KL(Bernoulli(p(y)) || Bernoulli(p_bar)); both tails via erfc to keep
  // 1 - p(y) accurate when p(y) is close to 1.
  auto kl = [&](double z) {
    const double u = (k - coupling * scale_y * z) / scale_cond;
    const double p = norm_cdf(u);
    const double pc = norm_sf(u);
    double term = 0.0;
    if (p > 0.0) term += p * (std::log(p) - log_p_bar);
    if (pc > 0.0) term += pc * (std::log(pc) - log_q_bar);
    return term;
  };
  const SharpFeature feature = default_switch(params, k);
  return std::max(0.0, expect_standard_normal(kl, q, {&feature, 1}));
}

TrancheSpec build_tranche_grid(const ModelParams& params, double k_min, double k_max, int m) {
  validate_params(params);
  if (!std::isfinite(k_min) || !std::isfinite(k_max) || !(k_min < k_max)) {
    throw Error(ErrorCode::BadGrid, "tranche grid needs finite k_min < k_max");
  }
  if (m < 2) {
    throw Error(ErrorCode::BadGrid, "tranche grid needs m >= 2, got " + std::to_string(m));
  }
  const double step = (k_max - k_min) / m;
  TrancheSpec spec;
  spec.thresholds.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    spec.thresholds.push_back(k_min + j * step);
    spec.target_default_probs.push_back(default_prob(params, spec.thresholds.back()));
  }
  spec.weights.assign(static_cast<std::size_t>(m), step);
  spec.reconstruction_bound = step;
  validate_spec(spec);
  return spec;
}

double staircase_payoff(const TrancheSpec& spec, double offset) {
  double total = 0.0;
  for (std::size_t j = 0; j < spec.thresholds.size(); ++j) {
    if (offset - spec.thresholds[j] >= 0.0) total += spec.weights[j];
  }
  return total;
}

}  // namespace barcodelab
