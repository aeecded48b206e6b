#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "barcodelab/analytic_mi.hpp"
#include "barcodelab/config.hpp"

namespace barcodelab {

/// One row of the information sweep over portfolio size, values in nats.
struct SweepRow {
  int n = 1;
  double mi_asset = 0.0;
  double mi_total = 0.0;
  double mi_portfolio = 0.0;
  PortfolioLimit mi_portfolio_limit;
  double info_loss = 0.0;
  std::vector<double> mi_tranche;  // one per requested default probability
};

/// Rows come back ordered by n whatever order they were evaluated in.
std::vector<SweepRow> compute_sweep(const ModelParams& base, const std::vector<int>& n_values,
                                    const std::vector<double>& default_probs,
                                    const QuadratureSettings& q = {});

/// Header row plus one line per n; 12 significant digits.
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<double>& default_probs,
                      Unit unit);

std::string mi_report_json(const RunConfig& config);
std::string sweep_report_csv(const RunConfig& config);
std::string price_report_json(const RunConfig& config);
std::string tranche_report_json(const RunConfig& config);

struct RunResult {
  std::filesystem::path output;
  int exit_code = 0;
};

RunResult run_mi(const RunConfig& config, const std::filesystem::path& out_dir);
RunResult run_sweep(const RunConfig& config, const std::filesystem::path& out_dir);
RunResult run_price_report(const RunConfig& config, const std::filesystem::path& out_dir);
RunResult run_tranche_report(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace barcodelab
