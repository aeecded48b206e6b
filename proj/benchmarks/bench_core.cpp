#include <benchmark/benchmark.h>

#include <cmath>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/normal.hpp"
#include "barcodelab/oracle.hpp"
#include "barcodelab/pricing.hpp"
#include "barcodelab/tranche.hpp"

using namespace barcodelab;

namespace {

const ModelParams base{0.0, 0.3, 0.5, 0.5, 10};

void closed_forms(benchmark::State& state) {
  ModelParams p = base;
  p.assets = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi_total(p));
    benchmark::DoNotOptimize(mi_portfolio(p));
    benchmark::DoNotOptimize(mi_portfolio_limit(p));
  }
}
BENCHMARK(closed_forms)->Arg(10)->Arg(100000);

void normal_quantile(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inv_norm_cdf(p));
    p = p < 0.7 ? p * 1.37 : 1e-6;
  }
}
BENCHMARK(normal_quantile);

// Smooth integrand: Gauss-Hermite converges at the first refinement.
void tranche_mi_hermite(benchmark::State& state) {
  const double k = threshold_from_default_prob(base, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(mi_tranche(base, k));
}
BENCHMARK(tranche_mi_hermite);

// Nearly a step in y: forces the graded Gauss-Legendre fallback.
void tranche_mi_graded(benchmark::State& state) {
  const ModelParams p{0.0, 0.0, 1.0, 1.0, static_cast<int>(state.range(0))};
  const double k = threshold_from_default_prob(p, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(mi_tranche(p, k));
}
BENCHMARK(tranche_mi_graded)->Arg(100)->Arg(100000);

void price_gap(benchmark::State& state) {
  const TrancheSpec grid = build_tranche_grid(base, threshold_from_default_prob(base, 0.01),
                                              threshold_from_default_prob(base, 0.5),
                                              static_cast<int>(state.range(0)));
  const RiskPreferences prefs;
  for (auto _ : state) benchmark::DoNotOptimize(tranche_price_gap(base, prefs, grid).gap);
}
BENCHMARK(price_gap)->Arg(5)->Arg(50);

void sample_full_vector(benchmark::State& state) {
  ModelParams p = base;
  p.assets = static_cast<int>(state.range(0));
  const std::size_t count = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(sample_joint(p, count, 1).returns.data());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(sample_full_vector)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void oracle_portfolio_mi(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mi_portfolio_oracle(base, count, 3).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(oracle_portfolio_mi)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void oracle_tranche_mi(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const double k = threshold_from_default_prob(base, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(mi_tranche_oracle(base, k, count, 4).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(oracle_tranche_mi)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
