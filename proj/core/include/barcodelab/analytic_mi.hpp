#pragma once

#include <string_view>

#include "barcodelab/model.hpp"

namespace barcodelab {

/// Information is computed in nats; bits exist only at the reporting edge.
enum class Unit { Nats, Bits };

std::string_view to_string(Unit unit) noexcept;
Unit parse_unit(std::string_view text);  // throws ConfigError

double nats_to_bits(double nats) noexcept;
double bits_to_nats(double bits) noexcept;
double convert(double nats, Unit unit) noexcept;

/// I(X_i, Y_i).
double mi_asset_barcode(const ModelParams& params);

/// I(vec X, vec Y) from the closed form.
double mi_total(const ModelParams& params);

/// I(vec X, vec Y) from the two-eigenvalue structure of the unconditional and
/// conditional covariance of vec X: eigenvalue 1+J^2 (resp. 1) with
/// multiplicity n-1, plus the all-ones direction.
double mi_total_spectral(const ModelParams& params);

/// I(X, Y) for the pooled return and pooled barcode.
double mi_portfolio(const ModelParams& params);

enum class LimitKind {
  Finite,
  Infinite,       // a = 0 < c: I(X,Y) grows without bound
  Indeterminate,  // a = c = 0: ratio is 1 for every n, value is n-free
};

struct PortfolioLimit {
  double value = 0.0;  // +inf when kind == Infinite
  LimitKind kind = LimitKind::Finite;
};

std::string_view to_string(LimitKind kind) noexcept;

/// lim_{n -> inf} I(X, Y).
PortfolioLimit mi_portfolio_limit(const ModelParams& params);

struct CrossInformation {
  double derived = 0.0;  // from Cov(X_i, Y_j) = J c^2
  double printed = 0.0;  // with numerator J^2 c^2
};

/// I(X_i, Y_j), i != j. Requires n >= 2 (DomainError otherwise).
CrossInformation mi_cross(const ModelParams& params);

/// I(vec X, vec Y) - I(X, Y); equals (n-1)/2 ln(1+J^2).
double info_loss(const ModelParams& params);

struct MIReport {
  Unit unit = Unit::Nats;
  double mi_asset = 0.0;
  double mi_total = 0.0;
  double mi_portfolio = 0.0;
  double mi_cross = 0.0;        // 0 when n == 1
  double mi_cross_printed = 0.0;
  double info_loss = 0.0;
  PortfolioLimit mi_portfolio_limit;
};

MIReport mi_report(const ModelParams& params);

/// Same report with every information value converted to `unit`.
MIReport in_unit(const MIReport& report, Unit unit);

}  // namespace barcodelab
