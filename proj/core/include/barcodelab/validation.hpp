#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/config.hpp"
#include "barcodelab/experiments.hpp"
#include "barcodelab/tranche.hpp"

namespace barcodelab {

enum class CheckStatus {
  Pass,
  Fail,
  Documented,  // alternative formula the oracle contradicts; reported, not fatal
};

std::string_view to_string(CheckStatus status) noexcept;

struct CheckPoint {
  std::string label;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct CheckResult {
  std::string group;
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string detail;
  std::vector<CheckPoint> points;  // per grid point, when the check is a family
};

struct TenfoldPoint {
  ModelParams params;
  double p_d = 0.0;
  double mi_portfolio = 0.0;
  double mi_tranche = 0.0;
  double ratio = 0.0;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::optional<TenfoldPoint> tenfold;

  std::size_t count(CheckStatus status) const;
  bool passed() const { return count(CheckStatus::Fail) == 0; }
  const CheckResult* find(std::string_view name) const;
  std::string to_json() const;
};

/// The analytic formulas under test. Defaults are the library functions;
/// tests swap one out to confirm the suite notices.
struct ClosedForms {
  std::function<double(const ModelParams&)> mi_asset = mi_asset_barcode;
  std::function<double(const ModelParams&)> mi_total = barcodelab::mi_total;
  std::function<double(const ModelParams&)> mi_portfolio = barcodelab::mi_portfolio;
  std::function<double(const ModelParams&, double, const QuadratureSettings&)> mi_tranche =
      barcodelab::mi_tranche;
};

struct ValidationOptions {
  ModelParams base{0.0, 0.3, 0.5, 0.5, 10};
  McConfig mc;
  bool oracle_grid = true;
  QuadratureSettings quadrature;
  ClosedForms closed_forms;
};

ValidationOptions validation_options(const RunConfig& config);

/// 99th percentile of Binomial(trials, P(|t_19| > 3)): the number of 3-SE
/// exceedances a family of independent oracle checks may show by chance.
int exceedance_allowance(std::size_t trials);

ValidationReport run_validation(const ValidationOptions& options);

/// Writes validate.json; exit_code 0 iff every check passed or is documented.
RunResult run_validate(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace barcodelab
