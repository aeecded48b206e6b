#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/model.hpp"
#include "barcodelab/pricing.hpp"
#include "barcodelab/quadrature.hpp"

namespace barcodelab {

struct SweepConfig {
  std::vector<int> n_values;  // ascending, >= 1
};

struct TrancheConfig {
  std::vector<double> default_probs{0.5, 0.05, 0.005};
  int grid_m = 5;
  /// Decomposition grid range as threshold offsets; when absent the grid
  /// spans the thresholds of p_d_range.
  std::optional<std::pair<double, double>> k_range;
  std::pair<double, double> p_d_range{0.01, 0.5};
};

struct McConfig {
  std::size_t samples = 1'000'000;
  std::size_t large_samples = 10'000'000;  // canonical-point oracles
  std::uint64_t seed = 42;
};

struct ValidateConfig {
  bool oracle_grid = true;  // 81-point Gaussian and 162-point tranche oracle sweeps
};

struct OutputConfig {
  std::optional<std::filesystem::path> directory;
  Unit unit = Unit::Nats;
};

/// One JSON document drives every subcommand. Blocks are optional in the
/// file; each runner checks the ones it needs and raises ConfigError.
struct RunConfig {
  ModelParams model{0.0, 0.3, 0.5, 0.5, 10};
  std::optional<RiskPreferences> prefs;
  std::optional<SweepConfig> sweep;
  std::optional<TrancheConfig> tranche;
  std::optional<McConfig> mc;
  ValidateConfig validate;
  OutputConfig output;
  QuadratureSettings quadrature;
};

/// Every block populated with the built-in defaults (used when no --config).
RunConfig default_config();

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace barcodelab
