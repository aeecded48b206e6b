#include "barcodelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>

#include "barcodelab/error.hpp"

namespace barcodelab {

void validate_settings(const QuadratureSettings& settings) {
  if (settings.node_count < 11 || settings.node_count % 2 == 0) {
    throw Error(ErrorCode::DomainError,
                "quadrature node_count must be odd and >= 11, got " +
                    std::to_string(settings.node_count));
  }
  if (settings.max_doublings < 0 || !(settings.relative_tolerance > 0.0) ||
      settings.absolute_tolerance < 0.0) {
    throw Error(ErrorCode::DomainError, "quadrature tolerances must be positive");
  }
}

namespace {

GaussHermiteRule build_rule(int node_count) {
  // Weight exp(-x^2 / 2) on the real line; GSL solves the Jacobi eigenproblem.
  using Workspace = std::unique_ptr<gsl_integration_fixed_workspace,
                                    decltype(&gsl_integration_fixed_free)>;
  Workspace ws(gsl_integration_fixed_alloc(gsl_integration_fixed_hermite,
                                           static_cast<std::size_t>(node_count), 0.0, 0.5,
                                           0.0, 0.0),
               &gsl_integration_fixed_free);
  if (!ws) {
    throw Error(ErrorCode::DomainError,
                "cannot build Gauss-Hermite rule with " + std::to_string(node_count) + " nodes");
  }
  const double* nodes = gsl_integration_fixed_nodes(ws.get());
  const double* weights = gsl_integration_fixed_weights(ws.get());
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  GaussHermiteRule rule;
  rule.nodes.assign(nodes, nodes + node_count);
  rule.weights.resize(static_cast<std::size_t>(node_count));
  for (int i = 0; i < node_count; ++i) rule.weights[i] = weights[i] * norm;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int node_count) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[node_count];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(node_count));
  return *slot;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

std::vector<double> apply_rule(const GaussHermiteRule& rule, std::size_t dimension,
                               const VectorIntegrand& f) {
  const std::size_t nodes = rule.nodes.size();
  // Column-major contributions: terms[d * nodes + i].
  std::vector<double> terms(dimension * nodes);
  std::vector<double> out(dimension);
  for (std::size_t i = 0; i < nodes; ++i) {
    f(rule.nodes[i], out);
    for (std::size_t d = 0; d < dimension; ++d) terms[d * nodes + i] = rule.weights[i] * out[d];
  }
  std::vector<double> result(dimension);
  for (std::size_t d = 0; d < dimension; ++d) {
    result[d] = pairwise_sum(std::span<const double>(terms).subspan(d * nodes, nodes));
  }
  return result;
}

bool stable(const std::vector<double>& coarse, const std::vector<double>& fine,
            const QuadratureSettings& settings) {
  for (std::size_t d = 0; d < fine.size(); ++d) {
    const double tol = settings.relative_tolerance * std::abs(fine[d]) + settings.absolute_tolerance;
    if (!(std::abs(fine[d] - coarse[d]) <= tol)) return false;
  }
  return true;
}

// The standard normal density underflows past |z| = 38.5.
constexpr double z_limit = 38.0;
constexpr int legendre_points = 20;
constexpr int max_panel_halvings = 8;

const gsl_integration_glfixed_table& legendre_table() {
  static const std::unique_ptr<gsl_integration_glfixed_table,
                               decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(legendre_points), &gsl_integration_glfixed_table_free);
  return *table;
}

std::vector<double> graded_mesh(std::span<const SharpFeature> features) {
  std::vector<double> edges;
  for (double z = -z_limit; z <= z_limit; z += 0.5) edges.push_back(z);
  for (const SharpFeature& feature : features) {
    if (!std::isfinite(feature.center) || !(feature.width > 0.0)) continue;
    const double c = std::clamp(feature.center, -z_limit, z_limit);
    edges.push_back(c);
    for (double d = feature.width / 4.0; d < 2.0 * z_limit; d *= 2.0) {
      if (c - d > -z_limit) edges.push_back(c - d);
      if (c + d < z_limit) edges.push_back(c + d);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<double> apply_composite(const std::vector<double>& edges, std::size_t dimension,
                                    const VectorIntegrand& f) {
  const gsl_integration_glfixed_table& table = legendre_table();
  const std::size_t panels = edges.size() - 1;
  const std::size_t nodes = panels * legendre_points;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> terms(dimension * nodes);
  std::vector<double> out(dimension);
  std::size_t i = 0;
  for (std::size_t p = 0; p < panels; ++p) {
    for (int j = 0; j < legendre_points; ++j, ++i) {
      double z = 0.0;
      double w = 0.0;
      gsl_integration_glfixed_point(edges[p], edges[p + 1], static_cast<std::size_t>(j), &z, &w,
                                    &table);
      w *= norm * std::exp(-0.5 * z * z);
      f(z, out);
      for (std::size_t d = 0; d < dimension; ++d) terms[d * nodes + i] = w * out[d];
    }
  }
  std::vector<double> result(dimension);
  for (std::size_t d = 0; d < dimension; ++d) {
    result[d] = pairwise_sum(std::span<const double>(terms).subspan(d * nodes, nodes));
  }
  return result;
}

std::vector<double> halve_panels(const std::vector<double>& edges) {
  std::vector<double> finer;
  finer.reserve(2 * edges.size());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    finer.push_back(edges[p]);
    finer.push_back(0.5 * (edges[p] + edges[p + 1]));
  }
  finer.push_back(edges.back());
  return finer;
}

}  // namespace

QuadratureResult expect_standard_normal(std::size_t dimension, const VectorIntegrand& f,
                                        const QuadratureSettings& settings,
                                        std::span<const SharpFeature> features) {
  validate_settings(settings);
  int nodes = settings.node_count;
  std::vector<double> coarse = apply_rule(gauss_hermite_rule(nodes), dimension, f);
  for (int doubling = 1; doubling <= settings.max_doublings; ++doubling) {
    nodes = 2 * nodes - 1;
    std::vector<double> fine = apply_rule(gauss_hermite_rule(nodes), dimension, f);
    if (stable(coarse, fine, settings)) return {std::move(fine), nodes};
    coarse = std::move(fine);
  }
  if (features.empty()) {
    throw Error(ErrorCode::QuadratureUnconverged,
                "Gauss-Hermite result not stable to relative " +
                    std::to_string(settings.relative_tolerance) + " after " +
                    std::to_string(settings.max_doublings) + " node doublings (last rule " +
                    std::to_string(nodes) + " nodes)");
  }

  std::vector<double> edges = graded_mesh(features);
  coarse = apply_composite(edges, dimension, f);
  for (int halving = 1; halving <= max_panel_halvings; ++halving) {
    edges = halve_panels(edges);
    std::vector<double> fine = apply_composite(edges, dimension, f);
    if (stable(coarse, fine, settings)) {
      return {std::move(fine), static_cast<int>((edges.size() - 1) * legendre_points)};
    }
    coarse = std::move(fine);
  }
  throw Error(ErrorCode::QuadratureUnconverged,
              "neither Gauss-Hermite nor graded Gauss-Legendre settled to relative " +
                  std::to_string(settings.relative_tolerance));
}

double expect_standard_normal(const std::function<double(double)>& f,
                              const QuadratureSettings& settings,
                              std::span<const SharpFeature> features) {
  const auto result = expect_standard_normal(
      1, [&](double z, std::span<double> out) { out[0] = f(z); }, settings, features);
  return result.values[0];
}

}  // namespace barcodelab
