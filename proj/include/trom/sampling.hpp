#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "trom/fom.hpp"

namespace trom {

/// Parameter-grid construction (uniform hL nodes, uniform or Chebyshev hR
/// nodes) and Monte Carlo sampling of the parameter box.

enum class NodeKind { Uniform, Chebyshev };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

struct ParameterBox {
  double hL_min = 10.0;
  double hL_max = 28.0;
  double hR_min = 0.0;
  double hR_max = 8.0;
};

struct ParameterGrid {
  Eigen::VectorXd hL_nodes;  // ascending, length N_L
  Eigen::VectorXd hR_nodes;  // ascending, length N_R
  NodeKind hR_kind = NodeKind::Chebyshev;
  ParameterBox box;

  static ParameterGrid make(const ParameterBox& box, int n_hL, int n_hR,
                            NodeKind hR_kind);
};

Eigen::VectorXd uniform_nodes(double vmin, double vmax, int n);

// Chebyshev nodes clustered toward hR_min, endpoints included.
Eigen::VectorXd chebyshev_nodes(double hR_min, double hR_max, int n);

// Uniform pairs from the box with hL > hR (rejection sampling), deterministic
// for a fixed seed.
std::vector<ParameterPair> monte_carlo_params(const ParameterBox& box, int n,
                                              std::uint64_t seed);

}  // namespace trom
