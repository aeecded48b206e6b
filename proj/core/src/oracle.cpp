#include "barcodelab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "barcodelab/error.hpp"
#include "barcodelab/normal.hpp"

namespace barcodelab {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::CovariancePlugin: return "cov-plugin";
    case EstimatorKind::BinnedMi: return "binned-mi";
    case EstimatorKind::McVariance: return "mc-var";
  }
  return "cov-plugin";
}

double EstimateWithError::z_score(double target) const {
  const double diff = value - target;
  if (std_error > 0.0) return diff / std_error;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
}

bool EstimateWithError::agrees_with(double target, double max_std_errors) const {
  return std::abs(z_score(target)) <= max_std_errors;
}

// ---------------------------------------------------------------------------

CovarianceAccumulator::CovarianceAccumulator(int dim)
    : dim_(dim),
      mean_(static_cast<std::size_t>(dim), 0.0),
      comoment_(static_cast<std::size_t>(dim * dim), 0.0),
      delta_(static_cast<std::size_t>(dim), 0.0) {}

void CovarianceAccumulator::add(std::span<const double> row) {
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (int i = 0; i < dim_; ++i) {
    delta_[i] = row[i] - mean_[i];
    mean_[i] += delta_[i] * inv;
  }
  // C += (x - mean_old)(x - mean_new)^T, upper triangle only.
  for (int i = 0; i < dim_; ++i) {
    const double di = delta_[i] * (1.0 - inv);
    double* c = comoment_.data() + static_cast<std::size_t>(i * dim_);
    for (int j = i; j < dim_; ++j) c[j] += di * delta_[j];
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (int i = 0; i < dim_; ++i) delta_[i] = other.mean_[i] - mean_[i];
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      const auto idx = static_cast<std::size_t>(i * dim_ + j);
      comoment_[idx] += other.comoment_[idx] + delta_[i] * delta_[j] * na * nb / n;
    }
  }
  for (int i = 0; i < dim_; ++i) mean_[i] += delta_[i] * nb / n;
  count_ += other.count_;
}

CovarianceMatrix CovarianceAccumulator::covariance() const {
  CovarianceMatrix out;
  out.dim = dim_;
  out.count = count_;
  out.values.assign(static_cast<std::size_t>(dim_ * dim_), 0.0);
  if (count_ < 2) return out;
  const double inv = 1.0 / static_cast<double>(count_ - 1);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      const double v = comoment_[static_cast<std::size_t>(i * dim_ + j)] * inv;
      out.values[static_cast<std::size_t>(i * dim_ + j)] = v;
      out.values[static_cast<std::size_t>(j * dim_ + i)] = v;
    }
  }
  return out;
}

BatchedCovariance::BatchedCovariance(int dim, int batches)
    : batches_(static_cast<std::size_t>(batches), CovarianceAccumulator(dim)) {
  if (batches < 2) throw Error(ErrorCode::DomainError, "batch means need at least two batches");
}

namespace {

EstimateWithError batch_means(double value, std::span<const double> batch_values,
                              std::size_t count, EstimatorKind kind) {
  const double b = static_cast<double>(batch_values.size());
  const double mean = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) / b;
  double ss = 0.0;
  for (double v : batch_values) ss += (v - mean) * (v - mean);
  EstimateWithError e;
  e.value = value;
  e.std_error = std::sqrt(ss / (b - 1.0) / b);
  e.sample_count = count;
  e.method = kind;
  e.batches = static_cast<int>(batch_values.size());
  return e;
}

/// Realization range [begin, end) owned by batch b.
std::pair<std::size_t, std::size_t> batch_range(std::size_t total, int batches, int b) {
  const std::size_t lo = total * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
  const std::size_t hi = total * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
  return {lo, hi};
}

void require_samples(std::size_t count, int batches) {
  if (batches < 2) throw Error(ErrorCode::DomainError, "batch means need at least two batches");
  if (count < static_cast<std::size_t>(batches) * 2) {
    throw Error(ErrorCode::DomainError, "too few samples for batch means");
  }
}

}  // namespace

EstimateWithError BatchedCovariance::estimate(
    const std::function<double(const CovarianceMatrix&)>& statistic, EstimatorKind kind) const {
  CovarianceAccumulator merged(batches_.front().dim());
  std::vector<double> per_batch;
  per_batch.reserve(batches_.size());
  for (const auto& acc : batches_) {
    merged.merge(acc);
    per_batch.push_back(statistic(acc.covariance()));
  }
  return batch_means(statistic(merged.covariance()), per_batch, merged.count(), kind);
}

double gaussian_mi_from_covariance(const CovarianceMatrix& cov, std::span<const int> u,
                                   std::span<const int> v) {
  const int du = static_cast<int>(u.size());
  const int dv = static_cast<int>(v.size());
  const int d = du + dv;
  Eigen::MatrixXd joint(d, d);
  auto index = [&](int k) { return k < du ? u[k] : v[k - du]; };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) joint(i, j) = cov(index(i), index(j));

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(joint, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw Error(ErrorCode::SingularCovariance,
                "sample covariance condition number exceeds 1e12");
  }

  auto log_det = [](const Eigen::MatrixXd& m) {
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  };
  const double mi = 0.5 * (log_det(joint.topLeftCorner(du, du)) +
                           log_det(joint.bottomRightCorner(dv, dv)) - log_det(joint));
  const double bias = static_cast<double>(du * dv) / (2.0 * static_cast<double>(cov.count));
  return mi - bias;
}

EstimateWithError gaussian_mi_from_samples(const SampleMatrix& u, const SampleMatrix& v,
                                           int batches) {
  if (u.rows != v.rows) {
    throw Error(ErrorCode::DomainError, "paired samples must have the same number of rows");
  }
  require_samples(u.rows, batches);
  const int du = static_cast<int>(u.cols);
  const int dv = static_cast<int>(v.cols);
  BatchedCovariance acc(du + dv, batches);
  std::vector<double> row(static_cast<std::size_t>(du + dv));
  for (int b = 0; b < batches; ++b) {
    const auto [lo, hi] = batch_range(u.rows, batches, b);
    for (std::size_t i = lo; i < hi; ++i) {
      std::copy_n(u.row(i).begin(), du, row.begin());
      std::copy_n(v.row(i).begin(), dv, row.begin() + du);
      acc.batch(b).add(row);
    }
  }
  std::vector<int> ui(static_cast<std::size_t>(du));
  std::vector<int> vi(static_cast<std::size_t>(dv));
  std::iota(ui.begin(), ui.end(), 0);
  std::iota(vi.begin(), vi.end(), du);
  return acc.estimate([&](const CovarianceMatrix& c) { return gaussian_mi_from_covariance(c, ui, vi); });
}

EstimateWithError gaussian_mi_from_samples(std::span<const double> u, std::span<const double> v,
                                           int batches) {
  SampleMatrix mu{u.size(), 1, {u.begin(), u.end()}};
  SampleMatrix mv{v.size(), 1, {v.begin(), v.end()}};
  return gaussian_mi_from_samples(mu, mv, batches);
}

// ---------------------------------------------------------------------------

BinnedMiTable::BinnedMiTable(int bins, int batches)
    : bins_(bins),
      batches_(batches),
      counts_(static_cast<std::size_t>(bins) * 2 * static_cast<std::size_t>(batches), 0) {
  if (bins < 2) throw Error(ErrorCode::DomainError, "binned MI needs at least two bins");
  if (batches < 2) throw Error(ErrorCode::DomainError, "batch means need at least two batches");
}

void BinnedMiTable::merge(const BinnedMiTable& other) {
  if (other.bins_ != bins_ || other.batches_ != batches_) {
    throw Error(ErrorCode::DomainError, "cannot merge tables of different shape");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

namespace {

/// Miller-Madow corrected plug-in MI of a 2 x B table.
double miller_madow_mi(std::span<const std::uint64_t> zero, std::span<const std::uint64_t> one) {
  const std::size_t bins = zero.size();
  double n0 = 0.0;
  double n1 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    n0 += static_cast<double>(zero[b]);
    n1 += static_cast<double>(one[b]);
  }
  const double n = n0 + n1;
  if (n == 0.0) return 0.0;
  auto plogp = [n](double c) { return c > 0.0 ? (c / n) * std::log(c / n) : 0.0; };

  double h_f = -(plogp(n0) + plogp(n1));
  int cells_f = (n0 > 0.0) + (n1 > 0.0);
  double h_y = 0.0;
  double h_joint = 0.0;
  int cells_y = 0;
  int cells_joint = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double c0 = static_cast<double>(zero[b]);
    const double c1 = static_cast<double>(one[b]);
    h_y -= plogp(c0 + c1);
    h_joint -= plogp(c0) + plogp(c1);
    cells_y += (c0 + c1) > 0.0;
    cells_joint += (c0 > 0.0) + (c1 > 0.0);
  }
  const double correction = (cells_f - 1 + cells_y - 1 - (cells_joint - 1)) / (2.0 * n);
  return h_f + h_y - h_joint + correction;
}

}  // namespace

EstimateWithError BinnedMiTable::estimate() const {
  const auto bins = static_cast<std::size_t>(bins_);
  std::vector<std::uint64_t> zero(bins, 0);
  std::vector<std::uint64_t> one(bins, 0);
  std::vector<double> per_batch;
  std::size_t total = 0;
  for (int b = 0; b < batches_; ++b) {
    const auto base = static_cast<std::size_t>(b) * 2 * bins;
    std::span<const std::uint64_t> z(counts_.data() + base, bins);
    std::span<const std::uint64_t> o(counts_.data() + base + bins, bins);
    for (std::size_t i = 0; i < bins; ++i) {
      zero[i] += z[i];
      one[i] += o[i];
      total += z[i] + o[i];
    }
    per_batch.push_back(miller_madow_mi(z, o));
  }
  const bool any_zero = std::any_of(zero.begin(), zero.end(), [](auto c) { return c > 0; });
  const bool any_one = std::any_of(one.begin(), one.end(), [](auto c) { return c > 0; });
  if (!any_zero || !any_one) {
    throw Error(ErrorCode::DegenerateMarginal, "binary sample takes a single value");
  }
  return batch_means(miller_madow_mi(zero, one), per_batch, total, EstimatorKind::BinnedMi);
}

EstimateWithError binned_mi_binary_continuous(std::span<const std::uint8_t> f,
                                              std::span<const double> y, int bins, int batches) {
  if (f.size() != y.size()) {
    throw Error(ErrorCode::DomainError, "paired samples must have equal length");
  }
  const std::size_t count = y.size();
  if (count < 1'000'000) {
    throw Error(ErrorCode::DomainError, "binned MI needs at least 1e6 pairs");
  }
  if (bins < 50 || static_cast<double>(bins) > std::sqrt(static_cast<double>(count))) {
    throw Error(ErrorCode::DomainError, "bin count must satisfy 50 <= B <= sqrt(count)");
  }
  require_samples(count, batches);

  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  // Upper edges of bins 0..B-2; bin B-1 is open above.
  std::vector<double> edges(static_cast<std::size_t>(bins - 1));
  for (int b = 1; b < bins; ++b) {
    edges[static_cast<std::size_t>(b - 1)] =
        sorted[static_cast<std::size_t>(count * b / bins)];
  }

  BinnedMiTable table(bins, batches);
  for (int b = 0; b < batches; ++b) {
    const auto [lo, hi] = batch_range(count, batches, b);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto bin = std::upper_bound(edges.begin(), edges.end(), y[i]) - edges.begin();
      table.add(b, f[i] != 0, static_cast<int>(bin));
    }
  }
  return table.estimate();
}

// ---------------------------------------------------------------------------

namespace oracle_assets {

OracleAsset single_asset(const ModelParams& params) {
  const double mu = params.mean_return;
  const double j = params.coupling;
  return {"single_asset", BarcodeSource::Asset, [mu, j](double y) { return mu + j * y; }};
}

OracleAsset portfolio_mean(const ModelParams& params) {
  const double mu = params.mean_return;
  const double slope = params.coupling / params.assets;
  return {"portfolio_mean", BarcodeSource::Pooled, [mu, slope](double y) { return mu + slope * y; }};
}

OracleAsset portfolio_total(const ModelParams& params) {
  const double mean = params.assets * params.mean_return;
  const double j = params.coupling;
  return {"portfolio_total", BarcodeSource::Pooled, [mean, j](double y) { return mean + j * y; }};
}

OracleAsset portfolio_share(const ModelParams& params, int shares) {
  const double mean = params.assets * params.mean_return / shares;
  const double slope = params.coupling / shares;
  return {"portfolio_share(" + std::to_string(shares) + ")", BarcodeSource::Pooled,
          [mean, slope](double y) { return mean + slope * y; }};
}

OracleAsset tranche(const ModelParams& params, double threshold, double weight) {
  const Moments m = moments(params);
  const double scale = std::sqrt(m.conditional_portfolio_variance);
  const double j = params.coupling;
  return {"tranche", BarcodeSource::Pooled, [=](double y) {
            // E[theta(X - n mu - k) | Y = y] = P(X - n mu - J y >= k - J y | Y).
            return weight * norm_sf((threshold - j * y) / scale);
          }};
}

}  // namespace oracle_assets

namespace {

/// Runs `per_sample(batch, draw)` over every realization of the aggregate
/// sampler, batches in parallel.
template <class PerSample>
void for_each_aggregate(const ModelParams& params, std::size_t count, std::uint64_t seed,
                        int batches, PerSample&& per_sample) {
  require_samples(count, batches);
  const AggregateSampler sampler(params, seed);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < batches; ++b) {
    const auto [lo, hi] = batch_range(count, batches, b);
    for (std::size_t i = lo; i < hi; ++i) per_sample(b, sampler.draw(i));
  }
}

}  // namespace

EstimateWithError mc_conditional_mean_variance(const OracleAsset& asset, const ModelParams& params,
                                               std::size_t count, std::uint64_t seed,
                                               int batches) {
  BatchedCovariance acc(1, batches);
  const bool own_barcode = asset.barcode == BarcodeSource::Asset;
  for_each_aggregate(params, count, seed, batches, [&](int b, const AggregateSampler::Draw& d) {
    const double y = own_barcode ? d.asset_barcode : d.portfolio_barcode;
    const double g = asset.conditional_mean(y);
    acc.batch(b).add(std::span<const double>(&g, 1));
  });
  return acc.estimate([](const CovarianceMatrix& c) { return c(0, 0); }, EstimatorKind::McVariance);
}

GaussianMiOracles gaussian_mi_oracles(const ModelParams& params, std::size_t count,
                                      std::uint64_t seed, int batches) {
  const ModelParams p = validate_params(params);
  require_samples(count, batches);
  const int n = p.assets;
  const int dim = 2 * n;
  BatchedCovariance acc(dim, batches);
  const JointSampler sampler(p, seed);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < batches; ++b) {
    std::vector<double> row(static_cast<std::size_t>(dim));
    std::span<double> returns(row.data(), static_cast<std::size_t>(n));
    std::span<double> barcodes(row.data() + n, static_cast<std::size_t>(n));
    const auto [lo, hi] = batch_range(count, batches, b);
    for (std::size_t i = lo; i < hi; ++i) {
      sampler.draw(i, returns, barcodes);
      acc.batch(b).add(row);
    }
  }

  std::vector<int> xs(static_cast<std::size_t>(n));
  std::vector<int> ys(static_cast<std::size_t>(n));
  std::iota(xs.begin(), xs.end(), 0);
  std::iota(ys.begin(), ys.end(), n);
  const int x1[] = {0};
  const int y1[] = {n};

  // Sample covariance of the pooled pair (X, Y) is the block sum of the joint one.
  auto pooled = [n](const CovarianceMatrix& c) {
    CovarianceMatrix s;
    s.dim = 2;
    s.count = c.count;
    s.values.assign(4, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        s.values[0] += c(i, j);
        s.values[1] += c(i, n + j);
        s.values[3] += c(n + i, n + j);
      }
    }
    s.values[2] = s.values[1];
    return s;
  };
  const int first[] = {0};
  const int second[] = {1};
  auto portfolio_mi = [&](const CovarianceMatrix& c) {
    return gaussian_mi_from_covariance(pooled(c), first, second);
  };
  auto total_mi = [&](const CovarianceMatrix& c) { return gaussian_mi_from_covariance(c, xs, ys); };

  GaussianMiOracles out;
  out.mi_asset = acc.estimate([&](const CovarianceMatrix& c) {
    return gaussian_mi_from_covariance(c, x1, y1);
  });
  out.mi_total = acc.estimate(total_mi);
  out.mi_portfolio = acc.estimate(portfolio_mi);
  out.info_loss = acc.estimate([&](const CovarianceMatrix& c) { return total_mi(c) - portfolio_mi(c); });
  if (n >= 2) {
    const int y2[] = {n + 1};
    out.mi_cross = acc.estimate([&](const CovarianceMatrix& c) {
      return gaussian_mi_from_covariance(c, x1, y2);
    });
  }
  CovarianceAccumulator merged(dim);
  for (int b = 0; b < batches; ++b) merged.merge(acc.batch(b));
  out.covariance = merged.covariance();
  return out;
}

EstimateWithError mi_cross_oracle(const ModelParams& params, std::size_t count, std::uint64_t seed,
                                  int batches) {
  ModelParams pair = validate_params(params);
  pair.assets = 2;
  require_samples(count, batches);
  BatchedCovariance acc(2, batches);
  const JointSampler sampler(pair, seed);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < batches; ++b) {
    double returns[2];
    double barcodes[2];
    const auto [lo, hi] = batch_range(count, batches, b);
    for (std::size_t i = lo; i < hi; ++i) {
      sampler.draw(i, returns, barcodes);
      const double row[2] = {returns[0], barcodes[1]};
      acc.batch(b).add(row);
    }
  }
  const int u[] = {0};
  const int v[] = {1};
  return acc.estimate([&](const CovarianceMatrix& c) { return gaussian_mi_from_covariance(c, u, v); });
}

EstimateWithError mi_portfolio_oracle(const ModelParams& params, std::size_t count,
                                      std::uint64_t seed, int batches) {
  BatchedCovariance acc(2, batches);
  for_each_aggregate(params, count, seed, batches, [&](int b, const AggregateSampler::Draw& d) {
    const double row[2] = {d.portfolio_return, d.portfolio_barcode};
    acc.batch(b).add(row);
  });
  const int u[] = {0};
  const int v[] = {1};
  return acc.estimate([&](const CovarianceMatrix& c) { return gaussian_mi_from_covariance(c, u, v); });
}

EstimateWithError mi_tranche_oracle(const ModelParams& params, double k, std::size_t count,
                                    std::uint64_t seed, int bins, int batches) {
  const ModelParams p = validate_params(params);
  const double centre = moments(p).portfolio_mean;
  const double barcode_scale = std::sqrt(moments(p).barcode_variance);
  BinnedMiTable table(bins, batches);
  for_each_aggregate(p, count, seed, batches, [&](int b, const AggregateSampler::Draw& d) {
    const bool paid = d.portfolio_return - centre - k >= 0.0;
    const double u = norm_cdf(d.portfolio_barcode / barcode_scale);
    const int bin = std::min(bins - 1, static_cast<int>(u * bins));
    table.add(b, paid, bin);
  });
  return table.estimate();
}

EstimateWithError tranche_price_gap_oracle(const ModelParams& params, double alpha,
                                           std::span<const double> thresholds,
                                           std::span<const double> weights, std::size_t count,
                                           std::uint64_t seed, int batches) {
  if (thresholds.size() != weights.size() || thresholds.empty()) {
    throw Error(ErrorCode::BadGrid, "need one weight per threshold");
  }
  const int m = static_cast<int>(thresholds.size());
  std::vector<OracleAsset> tranches;
  for (int j = 0; j < m; ++j) tranches.push_back(oracle_assets::tranche(params, thresholds[j], weights[j]));

  BatchedCovariance acc(m, batches);
  for_each_aggregate(params, count, seed, batches, [&](int b, const AggregateSampler::Draw& d) {
    double row[64];
    std::vector<double> wide;
    double* out = row;
    if (m > 64) {
      wide.resize(static_cast<std::size_t>(m));
      out = wide.data();
    }
    for (int j = 0; j < m; ++j) out[j] = tranches[static_cast<std::size_t>(j)].conditional_mean(d.portfolio_barcode);
    acc.batch(b).add(std::span<const double>(out, static_cast<std::size_t>(m)));
  });
  return acc.estimate(
      [&](const CovarianceMatrix& c) {
        double cross = 0.0;
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l)
            if (j != l) cross += c(j, l);
        return alpha * cross;
      },
      EstimatorKind::McVariance);
}

EstimateWithError share_size_ratio_oracle(const ModelParams& params, std::size_t count,
                                          std::uint64_t seed, int batches) {
  const ModelParams p = validate_params(params);
  if (!(p.coupling > 0.0)) {
    throw Error(ErrorCode::DomainError, "share size ratio needs J > 0");
  }
  const OracleAsset single = oracle_assets::single_asset(p);
  const OracleAsset total = oracle_assets::portfolio_total(p);
  BatchedCovariance acc(2, batches);
  for_each_aggregate(p, count, seed, batches, [&](int b, const AggregateSampler::Draw& d) {
    const double row[2] = {total.conditional_mean(d.portfolio_barcode),
                           single.conditional_mean(d.asset_barcode)};
    acc.batch(b).add(row);
  });
  const double n = p.assets;
  return acc.estimate([n](const CovarianceMatrix& c) { return c(0, 0) / (n * c(1, 1)); },
                      EstimatorKind::McVariance);
}

}  // namespace barcodelab
