#pragma once

// Brute-force Monte Carlo estimators used to cross-check every closed form.
// This module depends only on the model (sampling, moments) and the normal
// CDF; it never calls the analytic MI, tranche MI or pricing code it checks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "barcodelab/model.hpp"

namespace barcodelab {

inline constexpr int default_batches = 20;

enum class EstimatorKind { CovariancePlugin, BinnedMi, McVariance };

std::string_view to_string(EstimatorKind kind) noexcept;

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;  // batch means over `batches` equal blocks
  std::size_t sample_count = 0;
  EstimatorKind method = EstimatorKind::CovariancePlugin;
  int batches = default_batches;

  /// (value - target) / std_error; 0 when both coincide with zero error.
  double z_score(double target) const;
  bool agrees_with(double target, double max_std_errors = 3.0) const;
};

/// Unbiased sample covariance of a d-dimensional stream (row-major result).
struct CovarianceMatrix {
  int dim = 0;
  std::size_t count = 0;
  std::vector<double> values;

  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i * dim + j)]; }
};

/// Streaming mean / co-moment accumulator (Welford update, Chan merge).
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(int dim);

  void add(std::span<const double> row);
  void merge(const CovarianceAccumulator& other);

  std::size_t count() const noexcept { return count_; }
  int dim() const noexcept { return dim_; }
  CovarianceMatrix covariance() const;

 private:
  int dim_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // upper triangle stored in full d x d
  std::vector<double> delta_;
};

/// Keeps one accumulator per batch; realization i belongs to batch
/// i * batches / total so the split is fixed before sampling.
class BatchedCovariance {
 public:
  BatchedCovariance(int dim, int batches = default_batches);

  CovarianceAccumulator& batch(int b) { return batches_[static_cast<std::size_t>(b)]; }
  int batch_count() const noexcept { return static_cast<int>(batches_.size()); }

  /// Statistic on the merged stream with a batch-means standard error.
  EstimateWithError estimate(const std::function<double(const CovarianceMatrix&)>& statistic,
                             EstimatorKind kind = EstimatorKind::CovariancePlugin) const;

 private:
  std::vector<CovarianceAccumulator> batches_;
};

/// 1/2 ln(det S_U det S_V / det S_UV) over index sets of a joint covariance,
/// minus the first-order plug-in bias dim(U) dim(V) / (2N).
/// Throws SingularCovariance when cond(S_UV) > 1e12.
double gaussian_mi_from_covariance(const CovarianceMatrix& cov, std::span<const int> u,
                                   std::span<const int> v);

/// Row-major samples: rows are realizations.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Plug-in Gaussian MI between paired vector samples (bias-corrected).
EstimateWithError gaussian_mi_from_samples(const SampleMatrix& u, const SampleMatrix& v,
                                           int batches = default_batches);
EstimateWithError gaussian_mi_from_samples(std::span<const double> u, std::span<const double> v,
                                           int batches = default_batches);

/// 2 x B contingency table kept per batch.
class BinnedMiTable {
 public:
  BinnedMiTable(int bins, int batches = default_batches);

  void add(int batch, bool f, int bin) {
    ++counts_[(static_cast<std::size_t>(batch) * 2 + (f ? 1 : 0)) * bins_ + bin];
  }
  void merge(const BinnedMiTable& other);

  int bins() const noexcept { return bins_; }

  /// Miller-Madow corrected plug-in MI; throws DegenerateMarginal if every f is equal.
  EstimateWithError estimate() const;

 private:
  int bins_;
  int batches_;
  std::vector<std::uint64_t> counts_;  // [batch][f][bin]
};

/// Plug-in MI between a binary and a continuous sample over B equiprobable
/// (empirical-quantile) bins. Requires count >= 1e6 and 50 <= B <= sqrt(count).
EstimateWithError binned_mi_binary_continuous(std::span<const std::uint8_t> f,
                                              std::span<const double> y, int bins = 1000,
                                              int batches = default_batches);

enum class BarcodeSource { Asset, Pooled };  // Y_1 or Y = sum Y_i

/// An asset as seen by the oracle: which barcode it is priced with and its
/// conditional mean E[Z | barcode = y].
struct OracleAsset {
  std::string label;
  BarcodeSource barcode = BarcodeSource::Pooled;
  std::function<double(double)> conditional_mean;
};

namespace oracle_assets {
OracleAsset single_asset(const ModelParams& params);
OracleAsset portfolio_mean(const ModelParams& params);
OracleAsset portfolio_total(const ModelParams& params);
OracleAsset portfolio_share(const ModelParams& params, int shares);
/// weight * theta(X - n mu - threshold); conditional mean from the normal CDF.
OracleAsset tranche(const ModelParams& params, double threshold, double weight = 1.0);
}  // namespace oracle_assets

/// Sample variance of E[Z | Y = y_i] over draws of the asset's barcode.
EstimateWithError mc_conditional_mean_variance(const OracleAsset& asset, const ModelParams& params,
                                               std::size_t count, std::uint64_t seed,
                                               int batches = default_batches);

/// One pass of the full-vector sampler yields every Gaussian-MI oracle.
struct GaussianMiOracles {
  EstimateWithError mi_asset;      // I(X_1, Y_1)
  EstimateWithError mi_total;      // I(vec X, vec Y)
  EstimateWithError mi_portfolio;  // I(X, Y)
  EstimateWithError info_loss;     // difference of the two above, per batch
  std::optional<EstimateWithError> mi_cross;  // I(X_1, Y_2), n >= 2
  CovarianceMatrix covariance;     // joint covariance of (vec X, vec Y)
};

GaussianMiOracles gaussian_mi_oracles(const ModelParams& params, std::size_t count,
                                      std::uint64_t seed, int batches = default_batches);

/// I(X_i, Y_j), i != j, from (X_1, Y_2) pairs. The pair law does not depend
/// on n, so two-asset realizations are drawn regardless of params.assets.
EstimateWithError mi_cross_oracle(const ModelParams& params, std::size_t count,
                                  std::uint64_t seed, int batches = default_batches);

/// I(X, Y) from (X, Y) pairs of the aggregate sampler.
EstimateWithError mi_portfolio_oracle(const ModelParams& params, std::size_t count,
                                      std::uint64_t seed, int batches = default_batches);

/// I(F_k, Y): samples (theta(X - n mu - k), Y), bins Y into `bins`
/// equiprobable cells of its N(0, V(Y)) law, Miller-Madow plug-in MI.
EstimateWithError mi_tranche_oracle(const ModelParams& params, double k, std::size_t count,
                                    std::uint64_t seed, int bins = 1000,
                                    int batches = default_batches);

/// V(sum_j f_j E[F_j|Y]) - sum_j f_j^2 V(E[F_j|Y]), times alpha.
EstimateWithError tranche_price_gap_oracle(const ModelParams& params, double alpha,
                                           std::span<const double> thresholds,
                                           std::span<const double> weights, std::size_t count,
                                           std::uint64_t seed, int batches = default_batches);

/// V(E[X|Y]) / (n V(E[X_i|Y_i])): shares m satisfy m dp(X/m) >= n dp(X_i)
/// exactly when m <= this ratio.
EstimateWithError share_size_ratio_oracle(const ModelParams& params, std::size_t count,
                                          std::uint64_t seed, int batches = default_batches);

}  // namespace barcodelab
