#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace barcodelab {

/// One-factor Gaussian model of n exchangeable assets and their barcodes:
///
///   Y_i = eta_i + barcode_loading * eta_0
///   X_i = mean_return + xi_i + return_loading * xi_0 + coupling * Y_i
///
/// with xi_0..xi_n, eta_0..eta_n iid standard normal.
struct ModelParams {
  double mean_return = 0.0;
  double return_loading = 0.0;   // a: common-factor loading of returns
  double barcode_loading = 0.0;  // c: common-factor loading of barcodes
  double coupling = 0.0;         // J: barcode-to-return coupling
  int assets = 1;                // n

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Second moments of the model. "portfolio" quantities refer to the pooled
/// return X = sum X_i and pooled barcode Y = sum Y_i.
struct Moments {
  double portfolio_variance = 0.0;              // V(X)
  double barcode_variance = 0.0;                // V(Y)
  double conditional_portfolio_variance = 0.0;  // V(X | Y)
  double portfolio_mean = 0.0;                  // E[X]
  double conditional_mean_slope = 0.0;          // E[X | Y=y] = E[X] + slope * y

  double asset_variance = 0.0;                   // V(X_i)
  double asset_covariance = 0.0;                 // Cov(X_i, X_j), i != j
  double asset_barcode_covariance = 0.0;         // Cov(X_i, Y_i)
  double asset_cross_barcode_covariance = 0.0;   // Cov(X_i, Y_j), i != j
  double asset_barcode_variance = 0.0;           // V(Y_i)
  double barcode_covariance = 0.0;               // Cov(Y_i, Y_j), i != j
};

/// Returns `raw` unchanged when every field is finite, loadings are
/// non-negative and there is at least one asset. Throws Error otherwise
/// (NonFinite, NegativeLoading, BadCount).
ModelParams validate_params(const ModelParams& raw);

Moments moments(const ModelParams& params);

/// Row-major Monte Carlo draws of the full model.
struct SampleBatch {
  std::size_t count = 0;
  int assets = 0;
  std::uint64_t seed = 0;
  std::vector<double> returns;            // count x assets
  std::vector<double> barcodes;           // count x assets
  std::vector<double> portfolio_returns;  // row sums of `returns`
  std::vector<double> portfolio_barcodes; // row sums of `barcodes`

  std::span<const double> returns_row(std::size_t i) const {
    return {returns.data() + i * static_cast<std::size_t>(assets),
            static_cast<std::size_t>(assets)};
  }
  std::span<const double> barcodes_row(std::size_t i) const {
    return {barcodes.data() + i * static_cast<std::size_t>(assets),
            static_cast<std::size_t>(assets)};
  }
};

struct SamplingOptions {
  std::size_t memory_budget_bytes = std::size_t{1} << 31;
};

/// Draws realization `index` of the full model into caller-provided rows.
///
/// Substream layout for realization i: one NormalSource keyed by (seed, i),
/// consumed in the order xi_0, eta_0, then (xi_k, eta_k) for k = 1..n.
class JointSampler {
 public:
  JointSampler(const ModelParams& params, std::uint64_t seed);

  struct Totals {
    double portfolio_return;
    double portfolio_barcode;
  };

  Totals draw(std::uint64_t index, std::span<double> returns,
              std::span<double> barcodes) const;

  const ModelParams& params() const noexcept { return params_; }

 private:
  ModelParams params_;
  std::uint64_t seed_;
};

/// Exact-law sampler of (X_1, Y_1, X, Y) that never materializes the other
/// n-1 assets: their idiosyncratic sums are drawn as sqrt(n-1) * N(0,1).
/// Substream for realization i: xi_0, eta_0, xi_1, eta_1, xi_rest, eta_rest.
class AggregateSampler {
 public:
  AggregateSampler(const ModelParams& params, std::uint64_t seed);

  struct Draw {
    double asset_return;      // X_1
    double asset_barcode;     // Y_1
    double portfolio_return;  // X
    double portfolio_barcode; // Y
  };

  Draw draw(std::uint64_t index) const;

 private:
  ModelParams params_;
  std::uint64_t seed_;
  double rest_scale_;
};

/// Materializes `count` realizations. Throws AllocationTooLarge when the
/// batch would exceed options.memory_budget_bytes, DomainError if count == 0.
SampleBatch sample_joint(const ModelParams& params, std::size_t count,
                         std::uint64_t seed, const SamplingOptions& options = {});

}  // namespace barcodelab
