#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "barcodelab/config.hpp"
#include "barcodelab/error.hpp"
#include "barcodelab/experiments.hpp"
#include "barcodelab/report.hpp"
#include "barcodelab/validation.hpp"

namespace bl = barcodelab;

namespace {

// 1 is reserved for "ran fine, validation found failures".
int exit_code_for(bl::ErrorCode code) {
  switch (code) {
    case bl::ErrorCode::ConfigError: return 2;
    case bl::ErrorCode::IOError: return 3;
    case bl::ErrorCode::ValidationFailed: return 1;
    default: return 4;
  }
}

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string unit;
  std::optional<std::uint64_t> seed;
};

bl::RunConfig load(const Options& opt) {
  bl::RunConfig config = opt.config_path.empty() ? bl::default_config() : bl::load_config(opt.config_path);
  if (!opt.unit.empty()) config.output.unit = bl::parse_unit(opt.unit);
  if (opt.seed) {
    if (!config.mc) config.mc = bl::McConfig{};
    config.mc->seed = *opt.seed;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information content and barcode prices of portfolios and tranches"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_dir, "output directory (default: config, $BARCODELAB_OUT, cwd)");
  app.add_option("--unit", opt.unit, "nats or bits")->check(CLI::IsMember({"nats", "bits"}));
  app.add_option("--seed", opt.seed, "override mc.seed");

  auto* mi = app.add_subcommand("mi", "closed-form mutual information report (mi.json)");
  auto* sweep = app.add_subcommand("sweep", "information against portfolio size (sweep.csv)");
  auto* price = app.add_subcommand("price", "barcode prices and incentive balances (price.json)");
  auto* tranche = app.add_subcommand("tranche", "tranche information and price gap (tranche.json)");
  auto* validate = app.add_subcommand("validate", "identity and oracle suite (validate.json)");
  for (auto* sub : {mi, sweep, price, tranche, validate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const bl::RunConfig config = load(opt);
    const std::filesystem::path flag = opt.out_dir;
    const std::filesystem::path from_config = config.output.directory.value_or("");
    const auto out_dir = bl::resolve_output_dir(&flag, &from_config);

    bl::RunResult result;
    if (mi->parsed()) {
      result = bl::run_mi(config, out_dir);
    } else if (sweep->parsed()) {
      result = bl::run_sweep(config, out_dir);
    } else if (price->parsed()) {
      result = bl::run_price_report(config, out_dir);
    } else if (tranche->parsed()) {
      result = bl::run_tranche_report(config, out_dir);
    } else {
      result = bl::run_validate(config, out_dir);
      if (result.exit_code != 0) {
        fmt::print(stderr, "validation failed; see {}\n", result.output.string());
      }
    }
    fmt::print("{}\n", result.output.string());
    return result.exit_code;
  } catch (const bl::Error& e) {
    fmt::print(stderr, "barcodelab: {}\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "barcodelab: {}\n", e.what());
    return 4;
  }
}
