#include "trom/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace trom {

std::string to_string(NodeKind kind) {
  return kind == NodeKind::Uniform ? "uniform" : "chebyshev";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "uniform") return NodeKind::Uniform;
  if (s == "chebyshev") return NodeKind::Chebyshev;
  throw ValidationError("unknown node kind: " + s);
}

Eigen::VectorXd uniform_nodes(double vmin, double vmax, int n) {
  if (n < 2) throw ValidationError("uniform_nodes: need n >= 2");
  if (!(vmax > vmin)) throw ValidationError("uniform_nodes: vmax must be > vmin");
  Eigen::VectorXd nodes(n);
  for (int i = 0; i < n; ++i)
    nodes[i] = vmin + (vmax - vmin) * i / (n - 1);
  return nodes;
}

Eigen::VectorXd chebyshev_nodes(double hR_min, double hR_max, int n) {
  if (n < 2) throw ValidationError("chebyshev_nodes: need n >= 2");
  if (!(hR_max > hR_min))
    throw ValidationError("chebyshev_nodes: hR_max must be > hR_min");
  Eigen::VectorXd nodes(n);
  for (int j = 0; j < n; ++j) {
    const double angle = std::numbers::pi * j / (2.0 * (n - 1));
    nodes[j] = 0.5 * ((hR_min + 2.0 * hR_max) -
                      (2.0 * hR_max - hR_min) * std::cos(angle));
  }
  // cos(0) = 1 makes the j = 0 node exactly hR_min and cos(pi/2) = 0 gives
  // hR_max; force the endpoints to be roundoff-free.
  nodes[0] = hR_min;
  nodes[n - 1] = hR_max;
  return nodes;
}

ParameterGrid ParameterGrid::make(const ParameterBox& box, int n_hL, int n_hR,
                                  NodeKind hR_kind) {
  ParameterGrid grid;
  grid.box = box;
  grid.hR_kind = hR_kind;
  grid.hL_nodes = uniform_nodes(box.hL_min, box.hL_max, n_hL);
  grid.hR_nodes = hR_kind == NodeKind::Uniform
                      ? uniform_nodes(box.hR_min, box.hR_max, n_hR)
                      : chebyshev_nodes(box.hR_min, box.hR_max, n_hR);
  if (!(grid.hL_nodes[0] > grid.hR_nodes[n_hR - 1]))
    throw ValidationError(
        "ParameterGrid: every (hL_i, hR_j) must satisfy hL > hR");
  return grid;
}

std::vector<ParameterPair> monte_carlo_params(const ParameterBox& box, int n,
                                              std::uint64_t seed) {
  if (n < 1) throw ValidationError("monte_carlo_params: need n >= 1");
  if (!(box.hL_max > box.hR_min))
    throw ValidationError("monte_carlo_params: empty feasible set");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dL(box.hL_min, box.hL_max);
  std::uniform_real_distribution<double> dR(box.hR_min, box.hR_max);
  std::vector<ParameterPair> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    const double hL = dL(rng);
    const double hR = dR(rng);
    if (hL > hR) out.push_back({hL, hR});
  }
  return out;
}

}  // namespace trom
