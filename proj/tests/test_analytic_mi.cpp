#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/oracle.hpp"
#include "support/expect.hpp"
#include "support/reference.hpp"

using namespace barcodelab;

namespace {

bool rel_close(double a, double b, double rel, double abs_floor = 1e-15) {
  return std::abs(a - b) <= rel * std::abs(b) + abs_floor;
}

}  // namespace

TEST_SUITE("analytic_mi") {

TEST_CASE("mi_asset_barcode") {
  CHECK(mi_asset_barcode({0.0, 0.3, 0.5, 0.0, 10}) == 0.0);
  const ModelParams p{0.0, 1.0, 0.0, 0.5, 1};
  CHECK(mi_asset_barcode(p) == doctest::Approx(0.058891).epsilon(1e-5));
  CHECK(rel_close(mi_asset_barcode(p), ref::determinant_mi(1.0, 0.0, 0.5, 1).asset, 1e-12));
  const ModelParams q{0.0, 0.0, 1.0, 1.0, 1};
  CHECK(mi_asset_barcode(q) == doctest::Approx(0.549306).epsilon(1e-6));
  CHECK(rel_close(mi_asset_barcode(q), ref::determinant_mi(0.0, 1.0, 1.0, 1).asset, 1e-12));
}

TEST_CASE("mi_asset_barcode agrees with the sample-covariance oracle") {
  for (const ModelParams& p : {ModelParams{0.0, 1.0, 0.0, 0.5, 1}, ModelParams{0.0, 0.0, 1.0, 1.0, 1}}) {
    const SampleBatch s = sample_joint(p, 1'000'000, 314);
    const auto est = gaussian_mi_from_samples(std::span<const double>(s.returns), s.barcodes);
    CHECK_MESSAGE(est.agrees_with(mi_asset_barcode(p)), "z = " << est.z_score(mi_asset_barcode(p)));
  }
}

TEST_CASE("mi_total") {
  CHECK(mi_total({0.0, 0.3, 0.5, 0.0, 10}) == 0.0);
  CHECK(mi_total({0.0, 0.0, 0.0, 1.0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rel_close(mi_total({0.0, 0.0, 0.0, 1.0, 2}), ref::determinant_mi(0.0, 0.0, 1.0, 2).total, 1e-12));
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  CHECK(mi_total(p) == doctest::Approx(1.1935444).epsilon(1e-7));
  CHECK(rel_close(mi_total(p), ref::determinant_mi(0.3, 0.5, 0.5, 10).total, 1e-12));
}

TEST_CASE("mi_total equals the determinant form on a grid") {
  for (double a : {0.0, 0.3, 1.0})
    for (double c : {0.0, 0.3, 1.0})
      for (double j : {0.0, 0.5, 1.0})
        for (int n : {1, 2, 10}) {
          const ModelParams p{0.0, a, c, j, n};
          const auto d = ref::determinant_mi(a, c, j, n);
          CAPTURE(a); CAPTURE(c); CAPTURE(j); CAPTURE(n);
          CHECK(rel_close(mi_total(p), mi_total_spectral(p), 1e-12));
          // LLT determinants carry ~1e-14 relative rounding at n = 10.
          CHECK(rel_close(mi_total(p), d.total, 1e-10, 1e-13));
          CHECK(rel_close(mi_portfolio(p), d.portfolio, 1e-10, 1e-13));
          CHECK(rel_close(mi_asset_barcode(p), d.asset, 1e-10, 1e-13));
          if (n >= 2) CHECK(rel_close(mi_cross(p).derived, d.cross, 1e-10, 1e-13));
        }
}

TEST_CASE("mi_total agrees with the full-vector oracle") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  const auto o = gaussian_mi_oracles(p, 1'000'000, 2718);
  CHECK_MESSAGE(o.mi_total.agrees_with(mi_total(p)), "z = " << o.mi_total.z_score(mi_total(p)));
}

TEST_CASE("mi_portfolio") {
  CHECK(mi_portfolio({0.0, 0.3, 0.5, 0.0, 10}) == 0.0);
  for (int n : {1, 2, 10, 1000}) {
    CHECK(mi_portfolio({0.0, 0.4, 0.4, 0.5, n}) == doctest::Approx(0.5 * std::log(1.25)).epsilon(1e-14));
  }
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 100};
  CHECK(mi_portfolio(p) == doctest::Approx(0.250388).epsilon(1e-6));
  const Moments m = moments(p);
  CHECK(rel_close(mi_portfolio(p), 0.5 * std::log(m.portfolio_variance / m.conditional_portfolio_variance), 1e-12));
  const auto est = mi_portfolio_oracle(p, 1'000'000, 161);
  CHECK_MESSAGE(est.agrees_with(mi_portfolio(p)), "z = " << est.z_score(mi_portfolio(p)));
}

TEST_CASE("mi_portfolio_limit") {
  const PortfolioLimit vanish = mi_portfolio_limit({0.0, 0.3, 0.0, 0.5, 1});
  CHECK(vanish.value == 0.0);
  CHECK(vanish.kind == LimitKind::Finite);
  CHECK(mi_portfolio_limit({0.0, 0.6, 0.6, 0.5, 1}).value == doctest::Approx(0.5 * std::log(1.25)).epsilon(1e-14));

  const ModelParams p{0.0, 0.3, 0.5, 0.5, 1};
  const PortfolioLimit lim = mi_portfolio_limit(p);
  CHECK(lim.kind == LimitKind::Finite);
  CHECK(lim.value == doctest::Approx(0.2636775).epsilon(1e-6));
  ModelParams far = p;
  far.assets = 10'000'000;
  CHECK(std::abs(mi_portfolio(far) - lim.value) <= 1e-6);

  const PortfolioLimit inf = mi_portfolio_limit({0.0, 0.0, 0.5, 0.5, 1});
  CHECK(inf.kind == LimitKind::Infinite);
  CHECK(std::isinf(inf.value));
  CHECK(inf.value > 0);

  const PortfolioLimit flat = mi_portfolio_limit({0.0, 0.0, 0.0, 0.5, 1});
  CHECK(flat.kind == LimitKind::Indeterminate);
  CHECK(flat.value == doctest::Approx(0.5 * std::log1p(0.25)).epsilon(1e-14));
}

TEST_CASE("mi_cross derived and printed values") {
  const auto zero = mi_cross({0.0, 0.3, 0.0, 0.5, 2});
  CHECK(zero.derived == 0.0);
  CHECK(zero.printed == 0.0);

  const auto same = mi_cross({0.0, 0.0, 1.0, 0.5, 2});
  CHECK(same.derived == doctest::Approx(0.0435057).epsilon(1e-6));
  CHECK(same.printed == doctest::Approx(same.derived).epsilon(1e-14));
  CHECK(rel_close(same.derived, ref::determinant_mi(0.0, 1.0, 0.5, 2).cross, 1e-12));

  const ModelParams p{0.0, 0.0, 0.5, 1.0, 2};
  const auto split = mi_cross(p);
  CHECK(split.derived == doctest::Approx(0.011236).epsilon(1e-5));
  CHECK(split.printed == doctest::Approx(0.046544).epsilon(1e-5));
  CHECK(rel_close(split.derived, ref::determinant_mi(0.0, 0.5, 1.0, 2).cross, 1e-12));

  CHECK_ERROR_CODE(mi_cross({0.0, 0.3, 0.5, 0.5, 1}), ErrorCode::DomainError);
}

TEST_CASE("mi_cross oracle sides with the derived numerator") {
  const ModelParams p{0.0, 0.0, 0.5, 1.0, 2};
  const auto est = mi_cross_oracle(p, 10'000'000, 4242);
  const auto cross = mi_cross(p);
  CHECK_MESSAGE(est.agrees_with(cross.derived), "z = " << est.z_score(cross.derived));
  CHECK(std::abs(est.z_score(cross.printed)) > 3.0);
}

TEST_CASE("info_loss") {
  CHECK(info_loss({0.0, 0.3, 0.5, 0.5, 1}) == 0.0);
  CHECK(info_loss({0.0, 0.3, 0.5, 0.0, 10}) == 0.0);
  for (double a : {0.0, 0.3, 1.0}) {
    for (double c : {0.0, 0.3, 1.0}) {
      const ModelParams p{0.0, a, c, 0.5, 10};
      CHECK(info_loss(p) == doctest::Approx(1.0041460).epsilon(1e-7));
      const auto d = ref::determinant_mi(a, c, 0.5, 10);
      CHECK(std::abs(info_loss(p) - (d.total - d.portfolio)) <= 1e-10);
      CHECK(std::abs(info_loss(p) - 4.5 * std::log(1.25)) <= 1e-12 * info_loss(p));
    }
  }
}

TEST_CASE("data processing chain and observation on co-movement") {
  for (double a : {0.0, 0.3, 1.0})
    for (double c : {0.0, 0.3, 1.0})
      for (double j : {0.0, 0.5, 1.0})
        for (int n : {1, 2, 10, 100}) {
          const ModelParams p{0.0, a, c, j, n};
          CAPTURE(a); CAPTURE(c); CAPTURE(j); CAPTURE(n);
          CHECK(mi_portfolio(p) <= mi_total(p));
          CHECK(mi_asset_barcode(p) <= mi_total(p));
          const double diff = mi_portfolio(p) - mi_asset_barcode(p);
          if (n >= 2 && j > 0 && c != a) {
            CHECK((diff > 0) == (c > a));
          } else {
            CHECK(std::abs(diff) <= 1e-12);
          }
        }
}

TEST_CASE("monotone in n") {
  double prev = mi_portfolio({0.0, 0.3, 0.0, 0.5, 1});
  for (int n = 2; n <= 2000; ++n) {
    const double cur = mi_portfolio({0.0, 0.3, 0.0, 0.5, n});
    REQUIRE(cur < prev);
    prev = cur;
  }
  prev = mi_portfolio({0.0, 0.3, 0.5, 0.5, 1});
  for (int n = 2; n <= 2000; ++n) {
    const double cur = mi_portfolio({0.0, 0.3, 0.5, 0.5, n});
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("units") {
  CHECK(to_string(Unit::Nats) == "nats");
  CHECK(parse_unit("bits") == Unit::Bits);
  CHECK_ERROR_CODE(parse_unit("bans"), ErrorCode::ConfigError);
  for (double v : {0.0, 1e-300, 0.058891, 1.0, 123.456}) {
    CHECK(rel_close(nats_to_bits(v), v / std::numbers::ln2, 1e-15, 0.0));
    CHECK(rel_close(bits_to_nats(nats_to_bits(v)), v, 1e-15, 0.0));
  }
  const MIReport nats = mi_report({0.0, 0.3, 0.5, 0.5, 10});
  const MIReport bits = in_unit(nats, Unit::Bits);
  CHECK(bits.unit == Unit::Bits);
  CHECK(rel_close(bits.mi_total * std::numbers::ln2, nats.mi_total, 1e-15, 0.0));
  CHECK(rel_close(bits.info_loss * std::numbers::ln2, nats.info_loss, 1e-15, 0.0));
  CHECK(bits.mi_portfolio_limit.kind == nats.mi_portfolio_limit.kind);
}

TEST_CASE("mi_report collects every field") {
  const ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  const MIReport r = mi_report(p);
  CHECK(r.mi_asset == mi_asset_barcode(p));
  CHECK(r.mi_total == mi_total(p));
  CHECK(r.mi_portfolio == mi_portfolio(p));
  CHECK(r.mi_cross == mi_cross(p).derived);
  CHECK(r.mi_cross_printed == mi_cross(p).printed);
  CHECK(r.info_loss == info_loss(p));
  CHECK(mi_report({0.0, 0.3, 0.5, 0.5, 1}).mi_cross == 0.0);
}

}
