#include "barcodelab/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "barcodelab/error.hpp"

namespace barcodelab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void only_keys(const json& block, std::string_view name, std::initializer_list<std::string_view> keys) {
  if (!block.is_object()) fail(std::string(name) + " must be a JSON object");
  for (const auto& [key, value] : block.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail("unknown key '" + key + "' in " + std::string(name));
    }
  }
}

double number(const json& block, const char* key, std::string_view where) {
  const auto& v = block.at(key);
  if (!v.is_number()) fail(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& block, const char* key, double fallback, std::string_view where) {
  return block.contains(key) ? number(block, key, where) : fallback;
}

std::int64_t integer(const json& v, std::string_view what) {
  if (!v.is_number_integer()) fail(std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

ModelParams parse_model(const json& block) {
  only_keys(block, "model", {"mu", "a", "c", "J", "n"});
  ModelParams p{0.0, 0.3, 0.5, 0.5, 10};
  p.mean_return = number_or(block, "mu", p.mean_return, "model");
  p.return_loading = number_or(block, "a", p.return_loading, "model");
  p.barcode_loading = number_or(block, "c", p.barcode_loading, "model");
  p.coupling = number_or(block, "J", p.coupling, "model");
  if (block.contains("n")) p.assets = static_cast<int>(integer(block["n"], "model.n"));
  try {
    return validate_params(p);
  } catch (const Error& e) {
    fail(std::string("model: ") + e.what());
  }
}

RiskPreferences parse_prefs(const json& block) {
  only_keys(block, "prefs", {"alpha", "epsilon", "gamma"});
  const bool has_alpha = block.contains("alpha");
  const bool has_crra = block.contains("epsilon") || block.contains("gamma");
  if (has_alpha && has_crra) fail("prefs: give either alpha or epsilon+gamma, not both");
  try {
    if (has_crra) {
      if (!block.contains("epsilon") || !block.contains("gamma")) {
        fail("prefs: epsilon and gamma must be given together");
      }
      return RiskPreferences::from_crra(number(block, "epsilon", "prefs"), number(block, "gamma", "prefs"));
    }
    RiskPreferences prefs;
    prefs.alpha = number_or(block, "alpha", 1.0, "prefs");
    validate_prefs(prefs);
    return prefs;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(std::string("prefs: ") + e.what());
  }
}

SweepConfig parse_sweep(const json& block) {
  only_keys(block, "sweep", {"n_values", "n_range"});
  SweepConfig sweep;
  if (block.contains("n_values")) {
    if (!block["n_values"].is_array()) fail("sweep.n_values must be an array");
    for (const auto& v : block["n_values"]) sweep.n_values.push_back(static_cast<int>(integer(v, "sweep.n_values[]")));
  }
  if (block.contains("n_range")) {
    const auto& r = block["n_range"];
    only_keys(r, "sweep.n_range", {"start", "stop", "step"});
    const auto start = integer(r.at("start"), "sweep.n_range.start");
    const auto stop = integer(r.at("stop"), "sweep.n_range.stop");
    const auto step = r.contains("step") ? integer(r["step"], "sweep.n_range.step") : 1;
    if (step < 1 || start > stop) fail("sweep.n_range needs start <= stop and step >= 1");
    for (auto n = start; n <= stop; n += step) sweep.n_values.push_back(static_cast<int>(n));
  }
  if (sweep.n_values.empty()) fail("sweep needs n_values or n_range");
  std::sort(sweep.n_values.begin(), sweep.n_values.end());
  sweep.n_values.erase(std::unique(sweep.n_values.begin(), sweep.n_values.end()), sweep.n_values.end());
  if (sweep.n_values.front() < 1) fail("sweep n values must be >= 1");
  return sweep;
}

std::pair<double, double> pair_of(const json& v, std::string_view what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(std::string(what) + " must be a two-number array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

TrancheConfig parse_tranche(const json& block) {
  only_keys(block, "tranche", {"p_d", "grid_m", "k_range", "p_d_range"});
  TrancheConfig t;
  if (block.contains("p_d")) {
    if (!block["p_d"].is_array() || block["p_d"].empty()) fail("tranche.p_d must be a non-empty array");
    t.default_probs.clear();
    for (const auto& v : block["p_d"]) {
      if (!v.is_number()) fail("tranche.p_d entries must be numbers");
      const double p = v.get<double>();
      if (!(p > 0.0 && p < 1.0)) fail("tranche.p_d entries must lie in (0, 1)");
      t.default_probs.push_back(p);
    }
  }
  if (block.contains("grid_m")) {
    t.grid_m = static_cast<int>(integer(block["grid_m"], "tranche.grid_m"));
    if (t.grid_m < 2) fail("tranche.grid_m must be >= 2");
  }
  if (block.contains("k_range")) {
    t.k_range = pair_of(block["k_range"], "tranche.k_range");
    if (!(t.k_range->first < t.k_range->second)) fail("tranche.k_range must be increasing");
  }
  if (block.contains("p_d_range")) {
    t.p_d_range = pair_of(block["p_d_range"], "tranche.p_d_range");
    const auto [lo, hi] = t.p_d_range;
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) fail("tranche.p_d_range must satisfy 0 < lo < hi < 1");
  }
  return t;
}

McConfig parse_mc(const json& block) {
  only_keys(block, "mc", {"samples", "large_samples", "seed"});
  McConfig mc;
  if (!block.contains("seed")) fail("mc.seed is mandatory for Monte Carlo commands");
  const auto& seed = block["seed"];
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    fail("mc.seed must be a non-negative integer");
  }
  mc.seed = seed.get<std::uint64_t>();
  if (block.contains("samples")) {
    const auto s = integer(block["samples"], "mc.samples");
    if (s < 1000) fail("mc.samples must be >= 1000");
    mc.samples = static_cast<std::size_t>(s);
  }
  mc.large_samples = std::max(mc.samples, mc.large_samples);
  if (block.contains("large_samples")) {
    const auto s = integer(block["large_samples"], "mc.large_samples");
    if (s < 1000) fail("mc.large_samples must be >= 1000");
    mc.large_samples = static_cast<std::size_t>(s);
  }
  return mc;
}

OutputConfig parse_output(const json& block) {
  only_keys(block, "output", {"directory", "unit"});
  OutputConfig out;
  if (block.contains("directory")) {
    if (!block["directory"].is_string()) fail("output.directory must be a string");
    out.directory = block["directory"].get<std::string>();
  }
  if (block.contains("unit")) {
    if (!block["unit"].is_string()) fail("output.unit must be a string");
    out.unit = parse_unit(block["unit"].get<std::string>());
  }
  return out;
}

QuadratureSettings parse_quadrature(const json& block) {
  only_keys(block, "quadrature", {"node_count", "max_doublings", "relative_tolerance"});
  QuadratureSettings q;
  if (block.contains("node_count")) q.node_count = static_cast<int>(integer(block["node_count"], "quadrature.node_count"));
  if (block.contains("max_doublings")) q.max_doublings = static_cast<int>(integer(block["max_doublings"], "quadrature.max_doublings"));
  q.relative_tolerance = number_or(block, "relative_tolerance", q.relative_tolerance, "quadrature");
  try {
    validate_settings(q);
  } catch (const Error& e) {
    fail(std::string("quadrature: ") + e.what());
  }
  return q;
}

}  // namespace

RunConfig default_config() {
  RunConfig config;
  config.prefs = RiskPreferences{};
  SweepConfig sweep;
  for (int n = 1; n <= 1000; ++n) sweep.n_values.push_back(n);
  config.sweep = sweep;
  config.tranche = TrancheConfig{};
  config.mc = McConfig{};
  return config;
}

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  only_keys(doc, "config", {"model", "prefs", "sweep", "tranche", "mc", "validate", "output", "quadrature"});

  RunConfig config;
  try {
    if (doc.contains("model")) config.model = parse_model(doc["model"]);
    if (doc.contains("prefs")) config.prefs = parse_prefs(doc["prefs"]);
    if (doc.contains("sweep")) config.sweep = parse_sweep(doc["sweep"]);
    if (doc.contains("tranche")) config.tranche = parse_tranche(doc["tranche"]);
    if (doc.contains("mc")) config.mc = parse_mc(doc["mc"]);
    if (doc.contains("validate")) {
      const auto& v = doc["validate"];
      only_keys(v, "validate", {"oracle_grid"});
      if (v.contains("oracle_grid")) {
        if (!v["oracle_grid"].is_boolean()) fail("validate.oracle_grid must be a boolean");
        config.validate.oracle_grid = v["oracle_grid"].get<bool>();
      }
    }
    if (doc.contains("output")) config.output = parse_output(doc["output"]);
    if (doc.contains("quadrature")) config.quadrature = parse_quadrature(doc["quadrature"]);
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace barcodelab
