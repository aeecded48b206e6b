#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "barcodelab/model.hpp"
#include "barcodelab/quadrature.hpp"
#include "barcodelab/tranche.hpp"

namespace barcodelab {

/// Risk aversion of the mean-variance quote p_Z = E[Z] - alpha V(Z).
struct RiskPreferences {
  double alpha = 1.0;
  std::optional<double> epsilon;  // investment fraction, when derived from CRRA
  std::optional<double> gamma;    // CRRA coefficient, when derived

  static RiskPreferences from_crra(double epsilon, double gamma);
};

/// alpha = epsilon * gamma / 2 for CRRA utility (-U''W/U' = gamma).
/// Throws DomainError unless 0 < epsilon <= 1 and gamma >= 0.
double alpha_from_crra(double epsilon, double gamma);

/// Throws DomainError for negative or non-finite alpha.
void validate_prefs(const RiskPreferences& prefs);

namespace assets {
struct SingleAsset {};     // X_i, priced with its own barcode Y_i
struct PortfolioMean {};   // X / n, with pooled barcode Y
struct PortfolioTotal {};  // X, with Y
struct PortfolioShare {    // X / m, with Y
  int shares = 1;
};
struct Tranche {  // weight * theta(X - n mu - threshold), with Y
  double threshold = 0.0;
  double weight = 1.0;
};
}  // namespace assets

using Asset = std::variant<assets::SingleAsset, assets::PortfolioMean, assets::PortfolioTotal,
                           assets::PortfolioShare, assets::Tranche>;

std::string describe(const Asset& asset);

/// E[Z] - alpha V(Z).
double price_unconditional(const Asset& asset, const ModelParams& params,
                           const RiskPreferences& prefs);

/// E[Z | Y=y] - alpha V(Z | Y=y), y being the asset's barcode value.
double price_conditional(const Asset& asset, const ModelParams& params,
                         const RiskPreferences& prefs, double y);

/// delta p_Z = alpha V(E[Z | Y]). Tranche case integrates over Y and may
/// throw QuadratureUnconverged.
double barcode_price(const Asset& asset, const ModelParams& params, const RiskPreferences& prefs,
                     const QuadratureSettings& q = {});

/// V(Z) - E_Y[V(Z | Y)], the second route to delta p_Z / alpha.
double variance_reduction(const Asset& asset, const ModelParams& params,
                          const QuadratureSettings& q = {});

struct PriceQuote {
  Asset asset;
  double price_unconditional = 0.0;
  /// For linear assets price_conditional(y) = intercept + slope * y exactly;
  /// for tranches both are NaN and only `conditional_price` is meaningful.
  double conditional_intercept = 0.0;
  double conditional_slope = 0.0;
  std::function<double(double)> conditional_price;
  double barcode_price = 0.0;
};

PriceQuote quote(const Asset& asset, const ModelParams& params, const RiskPreferences& prefs,
                 const QuadratureSettings& q = {});

struct IncentiveBalance {
  double share_balance = 0.0;      // n dp(X/n) - sum_i dp(X_i)
  double portfolio_balance = 0.0;  // dp(X) - sum_i dp(X_i)
  double share_balance_closed_form = 0.0;      // -alpha (n-1) J^2
  double portfolio_balance_closed_form = 0.0;  // alpha n (n-1) J^2 c^2
  bool manager_short = false;  // share_balance < 0: no incentive to gather barcodes
  bool portfolio_premium = false;  // portfolio_balance > 0
};

IncentiveBalance incentive_balance(const ModelParams& params, const RiskPreferences& prefs);

struct MinShareSize {
  double printed_bound = 0.0;  // (1 + J^2 (1 + n c^2)) / (1 + J^2 (1 + c^2))
  double derived_bound = 0.0;  // (1 + n c^2) / (1 + c^2), from the share barcode price
  int largest_share_count = 1;  // largest m in 1..n with m dp(X/m) - n dp(X_i) >= 0
};

/// The three share-size numbers side by side. The integer scan prices shares
/// with barcode_price; prefs only matter through alpha > 0.
MinShareSize min_share_size(const ModelParams& params, const RiskPreferences& prefs = {});

struct TranchePriceGap {
  double gap = 0.0;              // staircase_price - sum(tranche_prices)
  double staircase_price = 0.0;  // dp of sum_j f_j F_j
  std::vector<double> tranche_prices;  // dp of f_j F_j
  /// Cov(E[F_j|Y], E[F_l|Y]), row-major m x m.
  std::vector<double> conditional_mean_covariances;
  double min_cross_covariance = 0.0;  // over j != l; 0 when m == 1
};

TranchePriceGap tranche_price_gap(const ModelParams& params, const RiskPreferences& prefs,
                                  const TrancheSpec& spec, const QuadratureSettings& q = {});

}  // namespace barcodelab
