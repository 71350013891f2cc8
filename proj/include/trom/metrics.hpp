#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "trom/bases.hpp"
#include "trom/fom.hpp"

namespace trom {

/// Space-time relative error norms between ROM and FOM trajectories and their
/// sup/average aggregates over the parameter domain.

// Snapshot matrices are Nx x N_T with one column per stored time level;
// time integrals use the trapezoidal rule over the recorded times, the spatial
// L2 norm is the cell-midpoint quadrature sum v_i^2 * dx.
double rel_error_l2l2(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& fom,
                      const std::vector<double>& times, double dx);

// Full H1 norm: L2 part plus forward-difference seminorm on interior cells.
double rel_error_l2h1(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& fom,
                      const std::vector<double>& times, double dx);

Eigen::MatrixXd trajectory_field_h(const Trajectory& traj);
Eigen::MatrixXd trajectory_field_q(const Trajectory& traj);

struct ErrorReport {
  double e_l2l2 = 0.0;
  double e_l2h1 = 0.0;
  double e_l2l2_q = 0.0;
  double e_l2h1_q = 0.0;
  Eigen::Index rank_h = 0;
  Eigen::Index rank_q = 0;
  ParameterPair mu;
  RomMethod method = RomMethod::NonInterp;
  bool failed = false;
  std::string failure;
};

enum class AggregateMode { OverHr, OverDomain };

struct AggregateReport {
  double sup_l2l2 = 0.0;
  double avg_l2l2 = 0.0;
  double sup_l2h1 = 0.0;
  double avg_l2h1 = 0.0;
  double mean_rank_h = 0.0;
  double mean_rank_q = 0.0;
  Eigen::Index max_rank_h = 0;
  Eigen::Index max_rank_q = 0;
  std::size_t sample_count = 0;
  std::string rule;  // "trapezoid-hR" or "mean"
};

// Sup = max; average = trapezoidal mean in hR for 1-D sweeps (reports must be
// sorted by hR), arithmetic mean for Monte Carlo samples.
AggregateReport aggregate(const std::vector<ErrorReport>& errs,
                          AggregateMode mode);

}  // namespace trom
