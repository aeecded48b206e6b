#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/config.hpp"
#include "barcodelab/experiments.hpp"
#include "barcodelab/pricing.hpp"
#include "barcodelab/report.hpp"
#include "barcodelab/tranche.hpp"
#include "support/expect.hpp"

using namespace barcodelab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("barcodelab_test_" + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const RunConfig c = default_config();
  CHECK(c.model == ModelParams{0.0, 0.3, 0.5, 0.5, 10});
  REQUIRE(c.prefs.has_value());
  CHECK(c.prefs->alpha == 1.0);
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->n_values.front() == 1);
  CHECK(c.sweep->n_values.back() == 1000);
  REQUIRE(c.mc.has_value());
  CHECK(c.mc->seed == 42);
  CHECK(c.output.unit == Unit::Nats);
}

TEST_CASE("parsing a full document") {
  const RunConfig c = parse_config(R"({
    "model": {"mu": 0.1, "a": 1, "c": 0.5, "J": 1, "n": 4},
    "prefs": {"epsilon": 0.5, "gamma": 4},
    "sweep": {"n_range": {"start": 1, "stop": 9, "step": 4}},
    "tranche": {"p_d": [0.2], "grid_m": 3},
    "mc": {"seed": 7, "samples": 2000000},
    "output": {"unit": "bits"},
    "validate": {"oracle_grid": false}
  })");
  CHECK(c.model == ModelParams{0.1, 1.0, 0.5, 1.0, 4});
  CHECK(c.prefs->alpha == doctest::Approx(1.0));
  CHECK(c.sweep->n_values == std::vector<int>{1, 5, 9});
  CHECK(c.tranche->default_probs == std::vector<double>{0.2});
  CHECK(c.tranche->grid_m == 3);
  CHECK(c.mc->seed == 7);
  CHECK(c.mc->samples == 2'000'000);
  CHECK(c.output.unit == Unit::Bits);
  CHECK_FALSE(c.validate.oracle_grid);
  CHECK_FALSE(parse_config("{}").mc.has_value());
}

TEST_CASE("config errors") {
  CHECK_ERROR_CODE(parse_config(R"({"modle": {}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"model": {"b": 1}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"mc": {"samples": 1000000}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"output": {"unit": "hartleys"}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"prefs": {"alpha": 1, "epsilon": 0.5, "gamma": 2}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"prefs": {"epsilon": 0.5}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"prefs": {"alpha": -1}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config(R"({"sweep": {"n_range": {"start": 5, "stop": 1}}})"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(parse_config("{not json"), ErrorCode::ConfigError);
  CHECK_ERROR_CODE(load_config("/nonexistent/cfg.json"), ErrorCode::IOError);
}

}

TEST_SUITE("report") {

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(0.0588910101)) == doctest::Approx(0.0588910101).epsilon(1e-11));
}

TEST_CASE("write_text_file") {
  const fs::path dir = scratch_dir("write");
  write_text_file(dir / "a.txt", "hello\n");
  CHECK(slurp(dir / "a.txt") == "hello\n");
  CHECK_ERROR_CODE(write_text_file(dir / "a.txt" / "b.txt", "x"), ErrorCode::IOError);
  fs::remove_all(dir);
}

TEST_CASE("output directory resolution") {
  const fs::path flag = "/tmp/flag_dir", cfg = "/tmp/cfg_dir";
  CHECK(resolve_output_dir(&flag, &cfg) == flag);
  CHECK(resolve_output_dir(nullptr, &cfg) == cfg);
  ::setenv("BARCODELAB_OUT", "/tmp/env_dir", 1);
  CHECK(resolve_output_dir(nullptr, nullptr) == fs::path("/tmp/env_dir"));
  ::unsetenv("BARCODELAB_OUT");
  CHECK(resolve_output_dir(nullptr, nullptr) == fs::current_path());
}

}

TEST_SUITE("experiments") {

TEST_CASE("sweep rows equal direct calls") {
  const ModelParams base{0.0, 0.3, 0.5, 0.5, 1};
  const std::vector<double> pds{0.5, 0.05};
  const auto rows = compute_sweep(base, {1, 2, 10, 100}, pds);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    ModelParams p = base;
    p.assets = r.n;
    CHECK(r.mi_asset == mi_asset_barcode(p));
    CHECK(r.mi_total == mi_total(p));
    CHECK(r.mi_portfolio == mi_portfolio(p));
    CHECK(r.info_loss == info_loss(p));
    CHECK(r.mi_portfolio_limit.value == mi_portfolio_limit(p).value);
    for (std::size_t j = 0; j < pds.size(); ++j) {
      CHECK(r.mi_tranche[j] == mi_tranche(p, threshold_from_default_prob(p, pds[j])));
    }
  }
  const std::string csv = sweep_csv(rows, pds, Unit::Nats);
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "n,mi_asset,mi_total,mi_portfolio,mi_portfolio_limit,info_loss,mi_tranche_pd_0.5,mi_tranche_pd_0.05");
  CHECK(first.rfind("1," + format_number(rows[0].mi_asset) + ",", 0) == 0);
  const std::string bits = sweep_csv(rows, pds, Unit::Bits);
  CHECK(bits.find(format_number(nats_to_bits(rows[0].mi_asset))) != std::string::npos);
}

TEST_CASE("sweep without a common barcode decreases") {
  std::vector<int> ns;
  for (int n = 1; n <= 200; ++n) ns.push_back(n);
  const auto rows = compute_sweep({0.0, 0.3, 0.0, 0.5, 1}, ns, {0.05});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].mi_portfolio < rows[i - 1].mi_portfolio);
    CHECK(rows[i].mi_tranche[0] <= rows[i].mi_portfolio);
  }
  CHECK(compute_sweep({0.0, 0.3, 0.0, 0.5, 1}, {100000}, {0.05}).front().mi_portfolio < 1e-4);
}

TEST_CASE("sweep with c > a approaches its limit") {
  const auto rows = compute_sweep({0.0, 0.3, 0.5, 0.5, 1}, {1, 10, 1000, 100000}, {0.05});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].mi_portfolio > rows[i - 1].mi_portfolio);
  CHECK(std::abs(rows.back().mi_portfolio - rows.back().mi_portfolio_limit.value) < 1e-4);
}

TEST_CASE("mi report") {
  RunConfig c;
  c.model = {0.0, 0.0, 0.5, 1.0, 2};
  const json doc = json::parse(mi_report_json(c));
  CHECK(doc["mi_cross"]["derived"].get<double>() == doctest::Approx(mi_cross(c.model).derived));
  CHECK(doc["mi_cross"]["printed_formula"].get<double>() == doctest::Approx(mi_cross(c.model).printed));
  CHECK(doc["mi_portfolio_limit"]["kind"] == "infinite");
  c.model.assets = 1;
  CHECK(json::parse(mi_report_json(c))["mi_cross"].is_null());
  c.output.unit = Unit::Bits;
  const json bits = json::parse(mi_report_json(c));
  CHECK(bits["mi_asset"].get<double>() == doctest::Approx(nats_to_bits(mi_asset_barcode(c.model))));
}

TEST_CASE("price report") {
  RunConfig c;
  CHECK_ERROR_CODE(price_report_json(c), ErrorCode::ConfigError);
  c.prefs = RiskPreferences{};
  const json doc = json::parse(price_report_json(c));
  CHECK(doc["incentive_balance"]["share_balance"].get<double>() == doctest::Approx(-2.25));
  CHECK(doc["incentive_balance"]["portfolio_balance"].get<double>() == doctest::Approx(5.625));
  CHECK(doc["shares"].size() == 10);
  CHECK(doc["tranche_price_gap"]["gap"].get<double>() >= 0.0);
  CHECK_FALSE(doc["quotes"][0].contains("oracle"));

  c.prefs->alpha = 0.0;
  const json zero = json::parse(price_report_json(c));
  for (const auto& q : zero["quotes"]) CHECK(q["barcode_price"].get<double>() == 0.0);
  CHECK(zero["tranche_price_gap"]["gap"].get<double>() == 0.0);

  c.prefs->alpha = 1.0;
  c.model.barcode_loading = 0.0;
  const json flat = json::parse(price_report_json(c));
  CHECK(flat["quotes"][2]["barcode_price"].get<double>() ==
        doctest::Approx(flat["sum_asset_barcode_prices"].get<double>()));
}

TEST_CASE("tranche report") {
  RunConfig c;
  c.tranche = TrancheConfig{};
  const json doc = json::parse(tranche_report_json(c));
  REQUIRE(doc["tranches"].size() == 3);
  for (const auto& t : doc["tranches"]) {
    CHECK(t["mi_tranche"].get<double>() <= t["binary_entropy"].get<double>());
  }
}

TEST_CASE("runs write files and repeat byte for byte") {
  RunConfig c = default_config();
  c.sweep->n_values = {1, 2, 5, 50};
  c.mc->samples = 1'000'000;
  const fs::path a = scratch_dir("run_a"), b = scratch_dir("run_b");
  for (const auto& dir : {a, b}) {
    CHECK(run_mi(c, dir).exit_code == 0);
    CHECK(run_sweep(c, dir).exit_code == 0);
    CHECK(run_price_report(c, dir).exit_code == 0);
  }
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

}
