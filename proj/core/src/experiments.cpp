#include "barcodelab/experiments.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "barcodelab/error.hpp"
#include "barcodelab/oracle.hpp"
#include "barcodelab/pricing.hpp"
#include "barcodelab/random.hpp"
#include "barcodelab/report.hpp"
#include "barcodelab/tranche.hpp"

namespace barcodelab {

using json = nlohmann::ordered_json;

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json params_json(const ModelParams& p) {
  return {{"mu", p.mean_return}, {"a", p.return_loading}, {"c", p.barcode_loading},
          {"J", p.coupling},     {"n", p.assets}};
}

json estimate_json(const EstimateWithError& e, double target) {
  return {{"value", num(e.value)},
          {"std_error", num(e.std_error)},
          {"samples", e.sample_count},
          {"method", std::string(to_string(e.method))},
          {"z_score", num(e.z_score(target))}};
}

ModelParams with_assets(ModelParams p, int n) {
  p.assets = n;
  return p;
}

const RiskPreferences& need_prefs(const RunConfig& config) {
  if (!config.prefs) throw Error(ErrorCode::ConfigError, "this command needs a prefs block");
  return *config.prefs;
}

TrancheConfig tranche_or_default(const RunConfig& config) {
  return config.tranche.value_or(TrancheConfig{});
}

TrancheSpec decomposition_grid(const ModelParams& p, const TrancheConfig& t) {
  if (t.k_range) return build_tranche_grid(p, t.k_range->first, t.k_range->second, t.grid_m);
  return build_tranche_grid(p, threshold_from_default_prob(p, t.p_d_range.first),
                            threshold_from_default_prob(p, t.p_d_range.second), t.grid_m);
}

constexpr const char* staircase_note =
    "The pooled return is Gaussian with full support, so it cannot be written exactly as a "
    "positive combination of step payoffs. The decomposition is applied to the staircase "
    "sum_j f_j theta(X - n mu - k_j), which tracks clamp(X - n mu, k_min, k_max) - k_min "
    "within one grid step.";

json gap_json(const TranchePriceGap& gap) {
  return {{"gap", num(gap.gap)},
          {"staircase_barcode_price", num(gap.staircase_price)},
          {"tranche_barcode_prices", gap.tranche_prices},
          {"min_cross_covariance", num(gap.min_cross_covariance)}};
}

}  // namespace

std::vector<SweepRow> compute_sweep(const ModelParams& base, const std::vector<int>& n_values,
                                    const std::vector<double>& default_probs,
                                    const QuadratureSettings& q) {
  validate_params(base);
  std::vector<SweepRow> rows(n_values.size());
  const auto count = static_cast<std::int64_t>(n_values.size());
  // Exceptions cannot leave an OpenMP region; park the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      const ModelParams p = with_assets(base, n_values[static_cast<std::size_t>(i)]);
      SweepRow& row = rows[static_cast<std::size_t>(i)];
      row.n = p.assets;
      row.mi_asset = mi_asset_barcode(p);
      row.mi_total = mi_total(p);
      row.mi_portfolio = mi_portfolio(p);
      row.mi_portfolio_limit = mi_portfolio_limit(p);
      row.info_loss = info_loss(p);
      for (double p_d : default_probs) {
        row.mi_tranche.push_back(mi_tranche(p, threshold_from_default_prob(p, p_d), q));
      }
    } catch (...) {
#pragma omp critical(barcodelab_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<double>& default_probs,
                      Unit unit) {
  std::string out = "n,mi_asset,mi_total,mi_portfolio,mi_portfolio_limit,info_loss";
  for (double p_d : default_probs) out += ",mi_tranche_pd_" + format_number(p_d);
  out += '\n';
  for (const SweepRow& r : rows) {
    out += std::to_string(r.n);
    for (double v : {r.mi_asset, r.mi_total, r.mi_portfolio, r.mi_portfolio_limit.value, r.info_loss}) {
      out += ',' + format_number(convert(v, unit));
    }
    for (double v : r.mi_tranche) out += ',' + format_number(convert(v, unit));
    out += '\n';
  }
  return out;
}

std::string mi_report_json(const RunConfig& config) {
  const ModelParams p = validate_params(config.model);
  const MIReport r = in_unit(mi_report(p), config.output.unit);
  json doc;
  doc["params"] = params_json(p);
  doc["unit"] = std::string(to_string(r.unit));
  doc["mi_asset"] = num(r.mi_asset);
  doc["mi_total"] = num(r.mi_total);
  doc["mi_portfolio"] = num(r.mi_portfolio);
  if (p.assets >= 2) {
    doc["mi_cross"] = {{"derived", num(r.mi_cross)}, {"printed_formula", num(r.mi_cross_printed)}};
  } else {
    doc["mi_cross"] = nullptr;
  }
  doc["info_loss"] = num(r.info_loss);
  doc["mi_portfolio_limit"] = {{"value", num(r.mi_portfolio_limit.value)},
                               {"kind", std::string(to_string(r.mi_portfolio_limit.kind))}};
  return doc.dump(2) + "\n";
}

std::string sweep_report_csv(const RunConfig& config) {
  if (!config.sweep) throw Error(ErrorCode::ConfigError, "sweep command needs a sweep block");
  const TrancheConfig t = tranche_or_default(config);
  const auto rows = compute_sweep(config.model, config.sweep->n_values, t.default_probs, config.quadrature);
  return sweep_csv(rows, t.default_probs, config.output.unit);
}

std::string price_report_json(const RunConfig& config) {
  const ModelParams p = validate_params(config.model);
  const RiskPreferences& prefs = need_prefs(config);
  const QuadratureSettings& q = config.quadrature;
  const TrancheConfig t = tranche_or_default(config);
  const auto& mc = config.mc;
  std::uint64_t tag = 0;

  json doc;
  doc["params"] = params_json(p);
  doc["alpha"] = prefs.alpha;
  if (prefs.epsilon) doc["crra"] = {{"epsilon", *prefs.epsilon}, {"gamma", *prefs.gamma}};

  auto quote_json = [&](const Asset& asset, const OracleAsset& oracle_asset) {
    const PriceQuote pq = quote(asset, p, prefs, q);
    json e = {{"asset", describe(asset)},
              {"price_unconditional", num(pq.price_unconditional)},
              {"barcode_price", num(pq.barcode_price)},
              {"variance_reduction_route", num(prefs.alpha * variance_reduction(asset, p, q))}};
    if (std::holds_alternative<assets::Tranche>(asset)) {
      e["conditional_price"] = "non-affine in y; see price_conditional";
    } else {
      e["conditional_price"] = {{"intercept", num(pq.conditional_intercept)},
                                {"slope", num(pq.conditional_slope)}};
    }
    if (mc) {
      auto est = mc_conditional_mean_variance(oracle_asset, p, mc->samples, derive_seed(mc->seed, ++tag));
      est.value *= prefs.alpha;
      est.std_error *= prefs.alpha;
      e["oracle"] = estimate_json(est, pq.barcode_price);
    } else {
      ++tag;
    }
    return e;
  };

  json quotes = json::array();
  quotes.push_back(quote_json(assets::SingleAsset{}, oracle_assets::single_asset(p)));
  quotes.push_back(quote_json(assets::PortfolioMean{}, oracle_assets::portfolio_mean(p)));
  quotes.push_back(quote_json(assets::PortfolioTotal{}, oracle_assets::portfolio_total(p)));
  for (double p_d : t.default_probs) {
    const double k = threshold_from_default_prob(p, p_d);
    json e = quote_json(assets::Tranche{k, 1.0}, oracle_assets::tranche(p, k));
    e["p_d"] = p_d;
    e["threshold"] = k;
    quotes.push_back(std::move(e));
  }
  doc["quotes"] = std::move(quotes);

  const double single = barcode_price(assets::SingleAsset{}, p, prefs);
  json shares = json::array();
  for (int m = 1; m <= p.assets; ++m) {
    const double dp = barcode_price(assets::PortfolioShare{m}, p, prefs);
    shares.push_back({{"m", m},
                      {"barcode_price", num(dp)},
                      {"revenue", num(m * dp)},
                      {"balance_vs_asset_barcodes", num(m * dp - p.assets * single)}});
  }
  doc["shares"] = std::move(shares);
  doc["sum_asset_barcode_prices"] = num(p.assets * single);

  const IncentiveBalance b = incentive_balance(p, prefs);
  doc["incentive_balance"] = {{"share_balance", num(b.share_balance)},
                              {"share_balance_closed_form", num(b.share_balance_closed_form)},
                              {"portfolio_balance", num(b.portfolio_balance)},
                              {"portfolio_balance_closed_form", num(b.portfolio_balance_closed_form)},
                              {"manager_short", b.manager_short},
                              {"portfolio_premium", b.portfolio_premium}};

  const MinShareSize s = min_share_size(p, prefs);
  json share_size = {{"printed_bound", num(s.printed_bound)},
                     {"derived_bound", num(s.derived_bound)},
                     {"largest_share_count", s.largest_share_count}};
  if (mc && p.coupling > 0.0 && prefs.alpha > 0.0) {
    const auto ratio = share_size_ratio_oracle(p, mc->samples, derive_seed(mc->seed, 1000));
    share_size["oracle_ratio"] = estimate_json(ratio, s.derived_bound);
    share_size["printed_bound_z_score"] = num(ratio.z_score(s.printed_bound));
  }
  doc["min_share_size"] = std::move(share_size);

  const TrancheSpec grid = decomposition_grid(p, t);
  const TranchePriceGap exact = tranche_price_gap(p, prefs, grid, q);
  json gap = gap_json(exact);
  gap["thresholds"] = grid.thresholds;
  gap["weights"] = grid.weights;
  gap["note"] = staircase_note;
  if (mc) {
    const auto est = tranche_price_gap_oracle(p, prefs.alpha, grid.thresholds, grid.weights,
                                              mc->samples, derive_seed(mc->seed, 1001));
    gap["oracle"] = estimate_json(est, exact.gap);
  }
  doc["tranche_price_gap"] = std::move(gap);
  return doc.dump(2) + "\n";
}

std::string tranche_report_json(const RunConfig& config) {
  const ModelParams p = validate_params(config.model);
  const QuadratureSettings& q = config.quadrature;
  const TrancheConfig t = tranche_or_default(config);
  const RiskPreferences prefs = config.prefs.value_or(RiskPreferences{});
  const Unit unit = config.output.unit;
  const double portfolio = mi_portfolio(p);

  json doc;
  doc["params"] = params_json(p);
  doc["unit"] = std::string(to_string(unit));
  doc["alpha"] = prefs.alpha;
  doc["mi_portfolio"] = num(convert(portfolio, unit));

  json tranches = json::array();
  std::uint64_t tag = 0;
  for (double p_d : t.default_probs) {
    const double k = threshold_from_default_prob(p, p_d);
    const double info = mi_tranche(p, k, q);
    json e = {{"p_d", p_d},
              {"threshold", k},
              {"default_prob", default_prob(p, k)},
              {"mi_tranche", num(convert(info, unit))},
              {"binary_entropy", num(convert(binary_entropy(default_prob(p, k)), unit))},
              {"portfolio_to_tranche_ratio", num(info > 0.0 ? portfolio / info : INFINITY)},
              {"barcode_price", num(barcode_price(assets::Tranche{k, 1.0}, p, prefs, q))}};
    if (config.mc) {
      auto est = mi_tranche_oracle(p, k, config.mc->samples, derive_seed(config.mc->seed, ++tag));
      est.value = convert(est.value, unit);
      est.std_error = convert(est.std_error, unit);
      e["oracle"] = estimate_json(est, convert(info, unit));
    }
    tranches.push_back(std::move(e));
  }
  doc["tranches"] = std::move(tranches);

  const TrancheSpec grid = decomposition_grid(p, t);
  json g = {{"m", grid.thresholds.size()},
            {"thresholds", grid.thresholds},
            {"weights", grid.weights},
            {"target_default_probs", grid.target_default_probs},
            {"reconstruction_bound", grid.reconstruction_bound},
            {"note", staircase_note}};
  const TranchePriceGap gap = tranche_price_gap(p, prefs, grid, q);
  g["price_gap"] = gap_json(gap);
  if (config.mc) {
    const auto est = tranche_price_gap_oracle(p, prefs.alpha, grid.thresholds, grid.weights,
                                              config.mc->samples, derive_seed(config.mc->seed, 1001));
    g["price_gap"]["oracle"] = estimate_json(est, gap.gap);
  }
  doc["decomposition"] = std::move(g);
  return doc.dump(2) + "\n";
}

RunResult run_mi(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "mi.json";
  write_text_file(path, mi_report_json(config));
  return {path, 0};
}

RunResult run_sweep(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "sweep.csv";
  write_text_file(path, sweep_report_csv(config));
  return {path, 0};
}

RunResult run_price_report(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "price.json";
  write_text_file(path, price_report_json(config));
  return {path, 0};
}

RunResult run_tranche_report(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "tranche.json";
  write_text_file(path, tranche_report_json(config));
  return {path, 0};
}

}  // namespace barcodelab
