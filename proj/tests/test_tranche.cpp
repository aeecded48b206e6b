#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/normal.hpp"
#include "barcodelab/oracle.hpp"
#include "barcodelab/quadrature.hpp"
#include "barcodelab/tranche.hpp"
#include "support/expect.hpp"
#include "support/reference.hpp"

using namespace barcodelab;

TEST_SUITE("normal") {

TEST_CASE("norm_cdf basics") {
  CHECK(norm_cdf(0.0) == 0.5);
  for (double z : {0.1, 0.5, 1.0, 2.5, 5.0, 8.0}) {
    CHECK(std::abs(norm_cdf(-z) + norm_cdf(z) - 1.0) <= 1e-12);
    CHECK(std::abs(norm_sf(z) - norm_cdf(-z)) <= 1e-300 + 1e-15 * norm_cdf(-z));
  }
}

TEST_CASE("norm_cdf against the series reference") {
  for (double z = -9.0; z <= 9.0; z += 0.05) {
    CHECK(std::abs(norm_cdf(z) - static_cast<double>(ref::norm_cdf(z))) < 1e-15);
  }
}

TEST_CASE("inv_norm_cdf") {
  CHECK(inv_norm_cdf(0.05) == doctest::Approx(-1.644854).epsilon(1e-6));
  CHECK(std::abs(inv_norm_cdf(0.05) - ref::inv_norm_cdf(0.05)) < 1e-12);
  for (double p : {1e-12, 1e-9, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.7, 0.975, 1 - 1e-6, 1 - 1e-12}) {
    CAPTURE(p);
    CHECK(std::abs(norm_cdf(inv_norm_cdf(p)) - p) < 1e-9);
    // upper tail by symmetry: 1 - p is exact in double there
    const double expected = p > 0.5 ? -ref::inv_norm_cdf(1.0 - p) : ref::inv_norm_cdf(p);
    CHECK(std::abs(inv_norm_cdf(p) - expected) < 1e-9);
  }
  CHECK_ERROR_CODE(inv_norm_cdf(0.0), ErrorCode::DomainError);
  CHECK_ERROR_CODE(inv_norm_cdf(1.0), ErrorCode::DomainError);
  CHECK_ERROR_CODE(inv_norm_cdf(-0.2), ErrorCode::DomainError);
  CHECK_ERROR_CODE(inv_norm_cdf(std::nan("")), ErrorCode::DomainError);
}

}

TEST_SUITE("tranche") {

TEST_CASE("default_prob") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  const double sd = std::sqrt(moments(p).portfolio_variance);
  CHECK(default_prob(p, 0.0) == 0.5);
  CHECK(default_prob(p, ref::inv_norm_cdf(0.05) * sd) == doctest::Approx(0.05).epsilon(1e-12));
  const double tail = default_prob(p, -40.0 * sd);
  CHECK(tail > 0.0);
  CHECK(tail < 1e-300);
  double prev = 0.0;
  for (double k = -30.0; k <= 30.0; k += 0.5) {
    const double cur = default_prob(p, k);
    CHECK(cur >= prev);
    prev = cur;
  }
  CHECK(default_prob({5.0, 0.3, 0.5, 0.5, 10}, 1.3) == default_prob(p, 1.3));
}

TEST_CASE("threshold_from_default_prob") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 50};
  CHECK(threshold_from_default_prob(p, 0.5) == doctest::Approx(0.0));
  // Bisection on default_prob itself.
  double lo = -1e3, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (default_prob(p, mid) < 0.05 ? lo : hi) = mid;
  }
  CHECK(threshold_from_default_prob(p, 0.05) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
  CHECK(threshold_from_default_prob(p, 0.05) ==
        doctest::Approx(-1.644854 * std::sqrt(moments(p).portfolio_variance)).epsilon(1e-6));
  for (double pd : {1e-6, 0.01, 0.3}) {
    CHECK(std::abs(default_prob(p, threshold_from_default_prob(p, pd)) - pd) <= 1e-9 * pd);
  }
  CHECK_ERROR_CODE(threshold_from_default_prob(p, 0.0), ErrorCode::DomainError);
  CHECK_ERROR_CODE(threshold_from_default_prob(p, 1.0), ErrorCode::DomainError);
}

TEST_CASE("conditional_default_prob") {
  const ModelParams flat{0.0, 0.3, 0.5, 0.0, 10};
  const double sd_cond = std::sqrt(moments(flat).conditional_portfolio_variance);
  for (double y : {-5.0, 0.0, 3.0}) {
    CHECK(conditional_default_prob(flat, -1.0, y) == doctest::Approx(norm_cdf(-1.0 / sd_cond)).epsilon(1e-15));
  }
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  CHECK(conditional_default_prob(p, 0.0, 0.0) == 0.5);
  CHECK(conditional_default_prob(p, 0.0, 1.0) < conditional_default_prob(p, 0.0, 0.0));
}

TEST_CASE("tower property on the grid") {
  for (double a : {0.0, 0.3, 1.0})
    for (double c : {0.0, 0.3, 1.0})
      for (double j : {0.0, 0.5, 1.0})
        for (int n : {1, 2, 10, 100})
          for (double pd : {0.5, 0.05, 0.005}) {
            const ModelParams p{0.0, a, c, j, n};
            const double k = threshold_from_default_prob(p, pd);
            const double sd_y = std::sqrt(moments(p).barcode_variance);
            const SharpFeature f = default_switch(p, k);
            const double e = expect_standard_normal(
                [&](double z) { return conditional_default_prob(p, k, sd_y * z); }, {}, {&f, 1});
            CHECK(std::abs(e - pd) <= 1e-9 * pd);
          }
}

TEST_CASE("mi_tranche") {
  CHECK(mi_tranche({0.0, 0.3, 0.5, 0.0, 10}, -2.0) == 0.0);
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 50};
  const double k = threshold_from_default_prob(p, 0.05);
  const double v = mi_tranche(p, k);
  CHECK(v > 0.0);
  CHECK(v < mi_portfolio(p));
  CHECK(v == doctest::Approx(ref::tranche_mi(0.3, 0.5, 0.5, 50, k)).epsilon(1e-8));
  CHECK_ERROR_CODE(mi_tranche(p, -1e4), ErrorCode::DomainError);
}

TEST_CASE("mi_tranche agrees with the binned oracle at 1e7 draws") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 50};
  const double k = threshold_from_default_prob(p, 0.05);
  const auto est = mi_tranche_oracle(p, k, 10'000'000, 1313);
  CHECK_MESSAGE(est.agrees_with(mi_tranche(p, k)), "z = " << est.z_score(mi_tranche(p, k)));
}

TEST_CASE("mi_tranche against an independent quadrature") {
  for (double a : {0.3, 1.0})
    for (double c : {0.0, 0.3, 1.0})
      for (int n : {1, 10})
        for (double pd : {0.5, 0.05, 0.005}) {
          const ModelParams p{0.0, a, c, 0.5, n};
          const double k = threshold_from_default_prob(p, pd);
          CAPTURE(a); CAPTURE(c); CAPTURE(n); CAPTURE(pd);
          CHECK(mi_tranche(p, k) == doctest::Approx(ref::tranche_mi(a, c, 0.5, n, k)).epsilon(1e-8));
        }
}

TEST_CASE("data processing, entropy bound, symmetry and seniority") {
  for (double a : {0.0, 0.3, 1.0})
    for (double c : {0.0, 0.3, 1.0})
      for (double j : {0.0, 0.5, 1.0})
        for (int n : {1, 2, 10, 100}) {
          const ModelParams p{0.0, a, c, j, n};
          double prev = INFINITY;
          for (double pd : {0.5, 0.2, 0.05, 0.01, 0.001}) {
            const double v = mi_tranche(p, threshold_from_default_prob(p, pd));
            CHECK(v <= mi_portfolio(p) + 1e-15);
            CHECK(v <= binary_entropy(pd) + 1e-15);
            const double mirrored = mi_tranche(p, threshold_from_default_prob(p, 1.0 - pd));
            CHECK(std::abs(mirrored - v) <= 1e-9 * v + 1e-15);
            if (j > 0) CHECK(v < prev);
            prev = v;
          }
        }
}

TEST_CASE("graded fallback handles near-step conditional defaults") {
  const ModelParams p{0.0, 0.0, 1.0, 1.0, 100};
  const double k = threshold_from_default_prob(p, 0.05);
  QuadratureSettings plain;
  const double sd_y = std::sqrt(moments(p).barcode_variance);
  auto pd = [&](double z) { return conditional_default_prob(p, k, sd_y * z); };
  CHECK_ERROR_CODE(expect_standard_normal(pd, plain), ErrorCode::QuadratureUnconverged);
  const SharpFeature f = default_switch(p, k);
  CHECK(std::abs(expect_standard_normal(pd, plain, {&f, 1}) - 0.05) < 1e-12);
  const double v = mi_tranche(p, k);
  CHECK(v > 0.0);
  CHECK(v < binary_entropy(0.05));
  CHECK(v < mi_portfolio(p));
}

TEST_CASE("build_tranche_grid") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  const TrancheSpec s = build_tranche_grid(p, 0.0, 2.0, 2);
  CHECK(s.thresholds == std::vector<double>{0.0, 1.0});
  CHECK(s.weights == std::vector<double>{1.0, 1.0});
  CHECK(s.reconstruction_bound == 1.0);
  CHECK(s.target_default_probs.size() == 2);
  CHECK_ERROR_CODE(build_tranche_grid(p, 1.0, 1.0, 3), ErrorCode::BadGrid);
  CHECK_ERROR_CODE(build_tranche_grid(p, 0.0, 1.0, 1), ErrorCode::BadGrid);
  TrancheSpec bad{{1.0, 0.5}, {1.0, 1.0}, {}, 0.0};
  CHECK_ERROR_CODE(validate_spec(bad), ErrorCode::BadGrid);
  bad = {{0.0, 1.0}, {1.0, -1.0}, {}, 0.0};
  CHECK_ERROR_CODE(validate_spec(bad), ErrorCode::BadGrid);
}

TEST_CASE("staircase reconstruction error is bounded by the step") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  const double sd = std::sqrt(moments(p).portfolio_variance);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  double prev_error = INFINITY;
  double last_step = 0.0;
  for (int m : {5, 50, 10'000}) {
    const TrancheSpec s = build_tranche_grid(p, -2.0 * sd, 2.0 * sd, m);
    double err = 0.0;
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) {
      const double offset = sd * normal(rng);
      const double clamped = std::clamp(offset, -2.0 * sd, 2.0 * sd) + 2.0 * sd;
      err += std::abs(staircase_payoff(s, offset) - clamped);
    }
    err /= draws;
    CAPTURE(m);
    CHECK(err <= s.reconstruction_bound);
    CHECK(err < prev_error);
    prev_error = err;
    last_step = s.reconstruction_bound;
  }
  // mean sawtooth error is about half a step
  CHECK(prev_error < 0.55 * last_step);
}

TEST_CASE("binary entropy convention") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
}

}

TEST_SUITE("quadrature") {

TEST_CASE("rule moments") {
  const GaussHermiteRule& r = gauss_hermite_rule(201);
  CHECK(r.nodes.size() == 201);
  CHECK(pairwise_sum(r.weights) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expect_standard_normal([](double z) { return z * z; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(expect_standard_normal([](double z) { return z * z * z * z; }) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(std::abs(expect_standard_normal([](double z) { return z * z * z; })) < 1e-13);
  CHECK(expect_standard_normal([](double z) { return std::exp(z); }) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-12));
}

TEST_CASE("settings validation") {
  QuadratureSettings q;
  q.node_count = 200;
  CHECK_ERROR_CODE(validate_settings(q), ErrorCode::DomainError);
  q.node_count = 9;
  CHECK_ERROR_CODE(validate_settings(q), ErrorCode::DomainError);
  q.node_count = 11;
  validate_settings(q);
}

TEST_CASE("pairwise summation is order-fixed") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1.0 / (i + 1));
  CHECK(pairwise_sum(v) == pairwise_sum(v));
  CHECK(pairwise_sum(v) == doctest::Approx(7.485470860550345).epsilon(1e-14));
}

TEST_CASE("vector integrand refines every component") {
  const auto r = expect_standard_normal(
      2, [](double z, std::span<double> out) {
        out[0] = norm_cdf(z);
        out[1] = z * z;
      });
  CHECK(r.values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.node_count >= 401);
}

}
