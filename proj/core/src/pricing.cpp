#include "barcodelab/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "barcodelab/error.hpp"
#include "barcodelab/normal.hpp"

namespace barcodelab {

double alpha_from_crra(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon <= 1.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::DomainError, "investment fraction epsilon must lie in (0, 1]");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::DomainError, "CRRA coefficient gamma must be finite and >= 0");
  }
  return epsilon * gamma / 2.0;
}

RiskPreferences RiskPreferences::from_crra(double epsilon, double gamma) {
  RiskPreferences prefs;
  prefs.alpha = alpha_from_crra(epsilon, gamma);
  prefs.epsilon = epsilon;
  prefs.gamma = gamma;
  return prefs;
}

void validate_prefs(const RiskPreferences& prefs) {
  if (!(prefs.alpha >= 0.0) || !std::isfinite(prefs.alpha)) {
    throw Error(ErrorCode::DomainError, "risk aversion alpha must be finite and >= 0");
  }
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Z = offset + scale * (something linear in the model); E[Z|Y=y] = intercept + slope y.
struct LinearAsset {
  double mean;
  double variance;
  double conditional_intercept;
  double conditional_slope;
  double conditional_variance;
  double barcode_variance;
};

LinearAsset scaled(const LinearAsset& z, double factor) {
  return {factor * z.mean,
          factor * factor * z.variance,
          factor * z.conditional_intercept,
          factor * z.conditional_slope,
          factor * factor * z.conditional_variance,
          z.barcode_variance};
}

LinearAsset portfolio(const ModelParams& params, const Moments& m) {
  return {m.portfolio_mean,
          m.portfolio_variance,
          m.portfolio_mean,
          params.coupling,
          m.conditional_portfolio_variance,
          m.barcode_variance};
}

std::optional<LinearAsset> linear_form(const Asset& asset, const ModelParams& params) {
  const Moments m = moments(params);
  return std::visit(
      Overloaded{
          [&](const assets::SingleAsset&) -> std::optional<LinearAsset> {
            const double a2 = params.return_loading * params.return_loading;
            return LinearAsset{params.mean_return, m.asset_variance, params.mean_return,
                               params.coupling,    1.0 + a2,         m.asset_barcode_variance};
          },
          [&](const assets::PortfolioMean&) -> std::optional<LinearAsset> {
            return scaled(portfolio(params, m), 1.0 / params.assets);
          },
          [&](const assets::PortfolioTotal&) -> std::optional<LinearAsset> {
            return portfolio(params, m);
          },
          [&](const assets::PortfolioShare& share) -> std::optional<LinearAsset> {
            if (share.shares < 1) {
              throw Error(ErrorCode::DomainError, "share count must be >= 1");
            }
            return scaled(portfolio(params, m), 1.0 / share.shares);
          },
          [&](const assets::Tranche&) -> std::optional<LinearAsset> { return std::nullopt; },
      },
      asset);
}

const assets::Tranche& as_tranche(const Asset& asset) {
  const auto& t = std::get<assets::Tranche>(asset);
  if (!(t.weight > 0.0) || !std::isfinite(t.threshold)) {
    throw Error(ErrorCode::DomainError, "tranche needs finite threshold and positive weight");
  }
  return t;
}

/// Default probability of the tranche as a function of the standardized barcode z.
struct TrancheCurve {
  double threshold;
  double coupling_scaled;  // J * sqrt(V(Y))
  double conditional_scale;
  double p_bar;

  TrancheCurve(const ModelParams& params, double k) : threshold(k) {
    const Moments m = moments(params);
    coupling_scaled = params.coupling * std::sqrt(m.barcode_variance);
    conditional_scale = std::sqrt(m.conditional_portfolio_variance);
    p_bar = norm_cdf(k / std::sqrt(m.portfolio_variance));
  }

  double at(double z) const { return norm_cdf((threshold - coupling_scaled * z) / conditional_scale); }
};

}  // namespace

std::string describe(const Asset& asset) {
  return std::visit(
      Overloaded{
          [](const assets::SingleAsset&) -> std::string { return "single_asset"; },
          [](const assets::PortfolioMean&) -> std::string { return "portfolio_mean"; },
          [](const assets::PortfolioTotal&) -> std::string { return "portfolio_total"; },
          [](const assets::PortfolioShare& s) -> std::string {
            return "portfolio_share(" + std::to_string(s.shares) + ")";
          },
          [](const assets::Tranche& t) -> std::string {
            return "tranche(" + std::to_string(t.threshold) + ", " + std::to_string(t.weight) + ")";
          },
      },
      asset);
}

double price_unconditional(const Asset& asset, const ModelParams& params,
                           const RiskPreferences& prefs) {
  validate_prefs(prefs);
  if (const auto z = linear_form(asset, params)) {
    return z->mean - prefs.alpha * z->variance;
  }
  const auto& t = as_tranche(asset);
  const double p_bar = norm_cdf(t.threshold / std::sqrt(moments(params).portfolio_variance));
  const double q_bar = 1.0 - p_bar;
  return t.weight * q_bar - prefs.alpha * t.weight * t.weight * p_bar * q_bar;
}

double price_conditional(const Asset& asset, const ModelParams& params,
                         const RiskPreferences& prefs, double y) {
  validate_prefs(prefs);
  if (const auto z = linear_form(asset, params)) {
    return z->conditional_intercept + z->conditional_slope * y -
           prefs.alpha * z->conditional_variance;
  }
  const auto& t = as_tranche(asset);
  const double p = conditional_default_prob(params, t.threshold, y);
  const double q = 1.0 - p;
  return t.weight * q - prefs.alpha * t.weight * t.weight * p * q;
}

double barcode_price(const Asset& asset, const ModelParams& params, const RiskPreferences& prefs,
                     const QuadratureSettings& q) {
  validate_prefs(prefs);
  if (const auto z = linear_form(asset, params)) {
    return prefs.alpha * z->conditional_slope * z->conditional_slope * z->barcode_variance;
  }
  const auto& t = as_tranche(asset);
  if (prefs.alpha == 0.0 || params.coupling == 0.0) return 0.0;
  const TrancheCurve curve(validate_params(params), t.threshold);
  const SharpFeature feature = default_switch(params, t.threshold);
  const double mean = expect_standard_normal([&](double z) { return curve.at(z); }, q, {&feature, 1});
  const double var = expect_standard_normal(
      [&](double z) {
        const double d = curve.at(z) - mean;
        return d * d;
      },
      q, {&feature, 1});
  return prefs.alpha * t.weight * t.weight * var;
}

double variance_reduction(const Asset& asset, const ModelParams& params,
                          const QuadratureSettings& q) {
  if (const auto z = linear_form(asset, params)) {
    return z->variance - z->conditional_variance;
  }
  const auto& t = as_tranche(asset);
  const TrancheCurve curve(validate_params(params), t.threshold);
  const SharpFeature feature = default_switch(params, t.threshold);
  const double expected_conditional = expect_standard_normal(
      [&](double z) {
        const double p = curve.at(z);
        return p * (1.0 - p);
      },
      q, {&feature, 1});
  return t.weight * t.weight * (curve.p_bar * (1.0 - curve.p_bar) - expected_conditional);
}

PriceQuote quote(const Asset& asset, const ModelParams& params, const RiskPreferences& prefs,
                 const QuadratureSettings& q) {
  PriceQuote out;
  out.asset = asset;
  out.price_unconditional = price_unconditional(asset, params, prefs);
  out.barcode_price = barcode_price(asset, params, prefs, q);
  if (const auto z = linear_form(asset, params)) {
    out.conditional_intercept = z->conditional_intercept - prefs.alpha * z->conditional_variance;
    out.conditional_slope = z->conditional_slope;
  } else {
    out.conditional_intercept = std::numeric_limits<double>::quiet_NaN();
    out.conditional_slope = std::numeric_limits<double>::quiet_NaN();
  }
  out.conditional_price = [asset, params, prefs](double y) {
    return price_conditional(asset, params, prefs, y);
  };
  return out;
}

IncentiveBalance incentive_balance(const ModelParams& params, const RiskPreferences& prefs) {
  const ModelParams p = validate_params(params);
  validate_prefs(prefs);
  const double n = p.assets;
  const double per_asset = barcode_price(assets::SingleAsset{}, p, prefs);
  const double pooled_cost = n * per_asset;

  IncentiveBalance b;
  b.share_balance = n * barcode_price(assets::PortfolioMean{}, p, prefs) - pooled_cost;
  b.portfolio_balance = barcode_price(assets::PortfolioTotal{}, p, prefs) - pooled_cost;

  const double j2 = p.coupling * p.coupling;
  const double c2 = p.barcode_loading * p.barcode_loading;
  b.share_balance_closed_form = -prefs.alpha * (n - 1.0) * j2;
  b.portfolio_balance_closed_form = prefs.alpha * n * (n - 1.0) * j2 * c2;
  b.manager_short = b.share_balance < 0.0;
  b.portfolio_premium = b.portfolio_balance > 0.0;
  return b;
}

MinShareSize min_share_size(const ModelParams& params, const RiskPreferences& prefs) {
  const ModelParams p = validate_params(params);
  validate_prefs(prefs);
  const double n = p.assets;
  const double j2 = p.coupling * p.coupling;
  const double c2 = p.barcode_loading * p.barcode_loading;

  MinShareSize out;
  out.printed_bound = (1.0 + j2 * (1.0 + n * c2)) / (1.0 + j2 * (1.0 + c2));
  out.derived_bound = (1.0 + n * c2) / (1.0 + c2);

  // Ties (e.g. c = 0, m = 1) must count as >= 0 despite rounding.
  const double cost = n * barcode_price(assets::SingleAsset{}, p, prefs);
  const double tie = 1e-12 * std::max(cost, std::numeric_limits<double>::min());
  out.largest_share_count = 1;
  for (int m = 1; m <= p.assets; ++m) {
    const double revenue = m * barcode_price(assets::PortfolioShare{m}, p, prefs);
    if (revenue - cost >= -tie) out.largest_share_count = m;
  }
  return out;
}

TranchePriceGap tranche_price_gap(const ModelParams& params, const RiskPreferences& prefs,
                                  const TrancheSpec& spec, const QuadratureSettings& q) {
  const ModelParams p = validate_params(params);
  validate_prefs(prefs);
  validate_spec(spec);
  const std::size_t m = spec.thresholds.size();

  std::vector<TrancheCurve> curves;
  curves.reserve(m);
  std::vector<SharpFeature> features;
  for (double k : spec.thresholds) {
    curves.emplace_back(p, k);
    features.push_back(default_switch(p, k));
  }

  const auto means =
      expect_standard_normal(
          m,
          [&](double z, std::span<double> out) {
            for (std::size_t j = 0; j < m; ++j) out[j] = curves[j].at(z);
          },
          q, features)
          .values;

  // Upper triangle (j <= l) of the centered co-moments.
  const std::size_t pairs = m * (m + 1) / 2;
  const auto upper =
      expect_standard_normal(
          pairs,
          [&](double z, std::span<double> out) {
            std::vector<double> d(m);
            for (std::size_t j = 0; j < m; ++j) d[j] = curves[j].at(z) - means[j];
            std::size_t idx = 0;
            for (std::size_t j = 0; j < m; ++j)
              for (std::size_t l = j; l < m; ++l) out[idx++] = d[j] * d[l];
          },
          q, features)
          .values;

  TranchePriceGap out;
  out.conditional_mean_covariances.assign(m * m, 0.0);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = j; l < m; ++l) {
      out.conditional_mean_covariances[j * m + l] = upper[idx];
      out.conditional_mean_covariances[l * m + j] = upper[idx];
      ++idx;
    }
  }

  double diagonal = 0.0;
  double cross = 0.0;
  out.min_cross_covariance = m > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  out.tranche_prices.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double fj = spec.weights[j];
    out.tranche_prices[j] = prefs.alpha * fj * fj * out.conditional_mean_covariances[j * m + j];
    diagonal += out.tranche_prices[j];
    for (std::size_t l = 0; l < m; ++l) {
      if (l == j) continue;
      const double cov = out.conditional_mean_covariances[j * m + l];
      cross += prefs.alpha * fj * spec.weights[l] * cov;
      out.min_cross_covariance = std::min(out.min_cross_covariance, cov);
    }
  }
  out.gap = cross;
  out.staircase_price = diagonal + cross;
  return out;
}

}  // namespace barcodelab
