#include "barcodelab/analytic_mi.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "barcodelab/error.hpp"

namespace barcodelab {

std::string_view to_string(Unit unit) noexcept {
  return unit == Unit::Bits ? "bits" : "nats";
}

Unit parse_unit(std::string_view text) {
  if (text == "nats") return Unit::Nats;
  if (text == "bits") return Unit::Bits;
  throw Error(ErrorCode::ConfigError, "unit must be 'nats' or 'bits', got '" + std::string(text) + "'");
}

double nats_to_bits(double nats) noexcept { return nats / std::numbers::ln2; }
double bits_to_nats(double bits) noexcept { return bits * std::numbers::ln2; }

double convert(double nats, Unit unit) noexcept {
  return unit == Unit::Bits ? nats_to_bits(nats) : nats;
}

std::string_view to_string(LimitKind kind) noexcept {
  switch (kind) {
    case LimitKind::Finite: return "finite";
    case LimitKind::Infinite: return "infinite";
    case LimitKind::Indeterminate: return "indeterminate";
  }
  return "finite";
}

namespace {

struct Squares {
  double n, a2, c2, j2;
};

Squares squares(const ModelParams& raw) {
  const ModelParams p = validate_params(raw);
  return {static_cast<double>(p.assets), p.return_loading * p.return_loading,
          p.barcode_loading * p.barcode_loading, p.coupling * p.coupling};
}

}  // namespace

double mi_asset_barcode(const ModelParams& params) {
  const auto [n, a2, c2, j2] = squares(params);
  return 0.5 * std::log1p(j2 * (1.0 + c2) / (1.0 + a2));
}

double mi_portfolio(const ModelParams& params) {
  const auto [n, a2, c2, j2] = squares(params);
  return 0.5 * std::log1p(j2 * (1.0 + n * c2) / (1.0 + n * a2));
}

double mi_total(const ModelParams& params) {
  const auto [n, a2, c2, j2] = squares(params);
  return 0.5 * (n - 1.0) * std::log1p(j2) +
         0.5 * std::log1p(j2 * (1.0 + n * c2) / (1.0 + n * a2));
}

double mi_total_spectral(const ModelParams& params) {
  const Moments m = moments(params);
  const double n = params.assets;
  const double a2 = params.return_loading * params.return_loading;

  // Unconditional covariance of vec X: diagonal d, off-diagonal o.
  const double d = m.asset_variance;
  const double o = m.asset_covariance;
  const double free_unconditional = d - o;
  const double pooled_unconditional = d + (n - 1.0) * o;

  // Given vec Y, vec X = const + xi + a xi_0: diagonal 1+a^2, off-diagonal a^2.
  const double free_conditional = 1.0;
  const double pooled_conditional = 1.0 + n * a2;

  return 0.5 * ((n - 1.0) * std::log(free_unconditional / free_conditional) +
                std::log(pooled_unconditional / pooled_conditional));
}

PortfolioLimit mi_portfolio_limit(const ModelParams& params) {
  const auto [n, a2, c2, j2] = squares(params);
  if (a2 > 0.0) {
    return {0.5 * std::log1p(j2 * c2 / a2), LimitKind::Finite};
  }
  if (c2 > 0.0) {
    // a = 0 < c: I(X,Y) = 1/2 ln(1 + J^2 (1 + n c^2)) diverges; J = 0 stays at 0.
    if (j2 == 0.0) return {0.0, LimitKind::Finite};
    return {std::numeric_limits<double>::infinity(), LimitKind::Infinite};
  }
  return {0.5 * std::log1p(j2), LimitKind::Indeterminate};
}

CrossInformation mi_cross(const ModelParams& params) {
  const ModelParams p = validate_params(params);
  if (p.assets < 2) {
    throw Error(ErrorCode::DomainError, "cross information needs at least two assets");
  }
  const Moments m = moments(p);
  const double c2 = p.barcode_loading * p.barcode_loading;
  const double j2 = p.coupling * p.coupling;

  const double cov = m.asset_cross_barcode_covariance;
  const double rho2 = cov * cov / (m.asset_barcode_variance * m.asset_variance);
  const double printed_rho2 = j2 * c2 / (m.asset_barcode_variance * m.asset_variance);
  return {-0.5 * std::log1p(-rho2), -0.5 * std::log1p(-printed_rho2)};
}

double info_loss(const ModelParams& params) {
  return mi_total(params) - mi_portfolio(params);
}

MIReport mi_report(const ModelParams& params) {
  const ModelParams p = validate_params(params);
  MIReport r;
  r.mi_asset = mi_asset_barcode(p);
  r.mi_total = mi_total(p);
  r.mi_portfolio = mi_portfolio(p);
  if (p.assets >= 2) {
    const CrossInformation cross = mi_cross(p);
    r.mi_cross = cross.derived;
    r.mi_cross_printed = cross.printed;
  }
  r.info_loss = info_loss(p);
  r.mi_portfolio_limit = mi_portfolio_limit(p);
  return r;
}

MIReport in_unit(const MIReport& report, Unit unit) {
  if (report.unit == unit) return report;
  auto to = [&](double v) {
    return unit == Unit::Bits ? nats_to_bits(v) : bits_to_nats(v);
  };
  MIReport r = report;
  r.unit = unit;
  r.mi_asset = to(r.mi_asset);
  r.mi_total = to(r.mi_total);
  r.mi_portfolio = to(r.mi_portfolio);
  r.mi_cross = to(r.mi_cross);
  r.mi_cross_printed = to(r.mi_cross_printed);
  r.info_loss = to(r.info_loss);
  r.mi_portfolio_limit.value = to(r.mi_portfolio_limit.value);
  return r;
}

}  // namespace barcodelab
