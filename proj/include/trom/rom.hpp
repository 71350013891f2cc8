#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trom/bases.hpp"
#include "trom/fom.hpp"

namespace trom {

/// Galerkin-projected time integration of the finite-volume semi-discretization
/// in a given reduced basis, lifting to the full state for flux evaluation.

struct RomTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd alpha_h;  // N_T x rank_h, one coefficient row per snapshot
  Eigen::MatrixXd alpha_q;  // N_T x rank_q
};

struct Coefficients {
  Eigen::VectorXd alpha_h;
  Eigen::VectorXd alpha_q;
};

Coefficients project_ic(const FieldState& state, const LocalBasis& basis);

// One Heun step with per-stage projection through the basis. The lifted state
// is clipped (h floored at 0, q zeroed on dry cells) for flux evaluation only.
Coefficients rom_step(const Coefficients& alpha, const LocalBasis& basis,
                      const SpatialGrid& grid, double dt, double g);

FieldState reconstruct_state(const Coefficients& alpha,
                             const LocalBasis& basis);

// Integrates from the projected dam-break IC with the FOM's dt policy, storing
// coefficients on the FOM snapshot schedule.
RomTrajectory run_rom(const ParameterPair& mu_star, const LocalBasis& basis,
                      const RunConfig& cfg);

// Reconstructed depth / discharge snapshot matrices (Nx x N_T).
Eigen::MatrixXd rom_field_h(const RomTrajectory& traj, const LocalBasis& basis);
Eigen::MatrixXd rom_field_q(const RomTrajectory& traj, const LocalBasis& basis);

}  // namespace trom
