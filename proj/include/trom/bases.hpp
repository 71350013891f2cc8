#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "trom/sampling.hpp"
#include "trom/tensor.hpp"

namespace trom {

/// Parameter-specific reduced bases: interpolatory tROM (Lagrange contraction
/// of the core), non-interpolatory tROM (four bracketing cores), global POD,
/// and rank selection by local energy threshold.

enum class RomMethod { Interp, NonInterp, Pod };

std::string to_string(RomMethod m);
RomMethod rom_method_from_string(const std::string& s);

struct InterpolationVector {
  Eigen::VectorXd weights;          // aligned with the node array, sums to 1
  std::vector<int> support;         // the p active node indices, ascending
  int order = 0;
};

// Lagrange cardinal weights at x_star over the p nodes nearest x_star
// (ties broken toward the smaller index). Refuses extrapolation.
InterpolationVector lagrange_weights(const Eigen::VectorXd& nodes,
                                     double x_star, int p);

// Smallest rank with relative tail energy (root-sum-square) <= eps_loc.
// Singular values below 1e-14*sigma_1 are dropped first.
Eigen::Index select_rank(const Eigen::VectorXd& sigma, double eps_loc);

struct BasisFactor {
  Eigen::MatrixXd V;       // Nx x rank, orthonormal columns
  Eigen::VectorXd sigma;   // singular values of the local core
};

// Interpolatory local basis for one variable's Tucker model.
BasisFactor interp_local_basis(const TuckerModel& model,
                               const ParameterGrid& grid,
                               const ParameterPair& mu_star, int p,
                               double eps_loc);

// Non-interpolatory local basis from the four bracketing-node cores.
BasisFactor noninterp_local_basis(const TuckerModel& model,
                                  const ParameterGrid& grid,
                                  const ParameterPair& mu_star,
                                  double eps_loc);

// Leading left singular vectors of the snapshot matrix. Exactly one of
// fixed_rank (> 0) or eps_pod (> 0, rank from retained energy) applies.
BasisFactor pod_global_basis(const Eigen::MatrixXd& snapshots,
                             Eigen::Index fixed_rank, double eps_pod);

struct LocalBasis {
  Eigen::MatrixXd Vh;
  Eigen::MatrixXd Vq;
  ParameterPair mu_star;
  RomMethod method = RomMethod::NonInterp;

  Eigen::Index rank_h() const { return Vh.cols(); }
  Eigen::Index rank_q() const { return Vq.cols(); }
};

// Bracketing indices with node-hit handling: a component equal to a node uses
// that node as the low corner (the previous node at the top boundary).
struct Bracket {
  int low;
  int high;
};
Bracket bracket_indices(const Eigen::VectorXd& nodes, double x_star);

}  // namespace trom
