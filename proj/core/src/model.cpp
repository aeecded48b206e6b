#include "barcodelab/model.hpp"

#include <cmath>
#include <string>

#include "barcodelab/error.hpp"
#include "barcodelab/random.hpp"

namespace barcodelab {

ModelParams validate_params(const ModelParams& raw) {
  const bool finite = std::isfinite(raw.mean_return) && std::isfinite(raw.return_loading) &&
                      std::isfinite(raw.barcode_loading) && std::isfinite(raw.coupling);
  if (!finite) {
    throw Error(ErrorCode::NonFinite, "model parameters must be finite");
  }
  if (raw.return_loading < 0.0 || raw.barcode_loading < 0.0 || raw.coupling < 0.0) {
    throw Error(ErrorCode::NegativeLoading, "loadings a, c and coupling J must be >= 0");
  }
  if (raw.assets < 1) {
    throw Error(ErrorCode::BadCount,
                "number of assets must be >= 1, got " + std::to_string(raw.assets));
  }
  return raw;
}

Moments moments(const ModelParams& params) {
  const ModelParams p = validate_params(params);
  const double n = p.assets;
  const double a2 = p.return_loading * p.return_loading;
  const double c2 = p.barcode_loading * p.barcode_loading;
  const double j2 = p.coupling * p.coupling;

  Moments m;
  m.barcode_variance = n + n * n * c2;
  m.conditional_portfolio_variance = n * (1.0 + n * a2);
  m.portfolio_variance = m.conditional_portfolio_variance + j2 * m.barcode_variance;
  m.portfolio_mean = n * p.mean_return;
  m.conditional_mean_slope = p.coupling;

  m.asset_barcode_variance = 1.0 + c2;
  m.barcode_covariance = c2;
  m.asset_variance = 1.0 + a2 + j2 * (1.0 + c2);
  m.asset_covariance = a2 + j2 * c2;
  m.asset_barcode_covariance = p.coupling * (1.0 + c2);
  m.asset_cross_barcode_covariance = p.coupling * c2;
  return m;
}

JointSampler::JointSampler(const ModelParams& params, std::uint64_t seed)
    : params_(validate_params(params)), seed_(seed) {}

JointSampler::Totals JointSampler::draw(std::uint64_t index, std::span<double> returns,
                                        std::span<double> barcodes) const {
  NormalSource normal(SubstreamEngine(seed_, index));
  const double common_return = normal();
  const double common_barcode = normal();
  Totals totals{0.0, 0.0};
  for (int k = 0; k < params_.assets; ++k) {
    const double xi = normal();
    const double eta = normal();
    const double y = eta + params_.barcode_loading * common_barcode;
    const double x = params_.mean_return + xi + params_.return_loading * common_return +
                     params_.coupling * y;
    barcodes[k] = y;
    returns[k] = x;
    totals.portfolio_return += x;
    totals.portfolio_barcode += y;
  }
  return totals;
}

AggregateSampler::AggregateSampler(const ModelParams& params, std::uint64_t seed)
    : params_(validate_params(params)),
      seed_(seed),
      rest_scale_(std::sqrt(static_cast<double>(params.assets - 1))) {}

AggregateSampler::Draw AggregateSampler::draw(std::uint64_t index) const {
  NormalSource normal(SubstreamEngine(seed_, index));
  const double common_return = normal();
  const double common_barcode = normal();
  const double xi_1 = normal();
  const double eta_1 = normal();
  const double xi_rest = normal();
  const double eta_rest = normal();

  const double n = params_.assets;
  const double a = params_.return_loading;
  const double c = params_.barcode_loading;
  const double j = params_.coupling;

  Draw d{};
  d.asset_barcode = eta_1 + c * common_barcode;
  d.asset_return = params_.mean_return + xi_1 + a * common_return + j * d.asset_barcode;
  d.portfolio_barcode = eta_1 + rest_scale_ * eta_rest + n * c * common_barcode;
  d.portfolio_return = n * params_.mean_return + xi_1 + rest_scale_ * xi_rest +
                       n * a * common_return + j * d.portfolio_barcode;
  return d;
}

SampleBatch sample_joint(const ModelParams& params, std::size_t count, std::uint64_t seed,
                         const SamplingOptions& options) {
  const ModelParams p = validate_params(params);
  if (count == 0) {
    throw Error(ErrorCode::DomainError, "sample count must be >= 1");
  }
  const auto n = static_cast<std::size_t>(p.assets);
  // Guard the multiplication itself before comparing against the budget.
  const std::size_t per_row = (2 * n + 2) * sizeof(double);
  if (count > options.memory_budget_bytes / per_row) {
    throw Error(ErrorCode::AllocationTooLarge,
                std::to_string(count) + " x " + std::to_string(n) +
                    " draws exceed the memory budget of " +
                    std::to_string(options.memory_budget_bytes) + " bytes");
  }

  SampleBatch batch;
  batch.count = count;
  batch.assets = p.assets;
  batch.seed = seed;
  batch.returns.resize(count * n);
  batch.barcodes.resize(count * n);
  batch.portfolio_returns.resize(count);
  batch.portfolio_barcodes.resize(count);

  const JointSampler sampler(p, seed);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const auto totals =
        sampler.draw(row, {batch.returns.data() + row * n, n}, {batch.barcodes.data() + row * n, n});
    batch.portfolio_returns[row] = totals.portfolio_return;
    batch.portfolio_barcodes[row] = totals.portfolio_barcode;
  }
  return batch;
}

}  // namespace barcodelab
