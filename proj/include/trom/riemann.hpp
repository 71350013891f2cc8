#pragma once

#include <Eigen/Dense>

#include "trom/errors.hpp"

namespace trom {

/// Closed-form and semi-analytical dam-break solutions: dry-bed rarefaction,
/// wet-bed middle state via Newton iteration on the shock speed, the piecewise
/// wet-bed solution, and the hR -> 0 sensitivity asymptotics.

struct RiemannSolution {
  double h_m = 0.0;  // middle depth
  double u_m = 0.0;  // middle velocity
  double s = 0.0;    // shock speed
  double c = 0.0;    // sqrt(g*hL)
  double c_m = 0.0;  // sqrt(g*h_m)
  double residual = 0.0;
  // Wave boundaries at a given time (set by wave_positions).
  double x1 = 0.0;  // rarefaction tail
  double x2 = 0.0;  // rarefaction head / middle-state left edge
  double x3 = 0.0;  // shock position
};

struct PointValue {
  double u;
  double h;
};

// Self-similar dry-bed solution at (x, t); t = 0 returns the raw IC.
PointValue dry_bed_solution(double x, double t, double hL, double g,
                            double x_dam);

// Middle state (h_m, u_m) and shock speed s for hL > hR > 0. Newton with
// analytic derivative, bisection fallback on [c_R, 4c].
RiemannSolution solve_middle_state(double hL, double hR, double g,
                                   double tol = 1e-13, int max_iter = 50);

// Piecewise wet-bed solution at (x, t); t = 0 returns the raw IC.
PointValue wet_bed_solution(double x, double t, double hL, double hR, double g,
                            double x_dam);

// Fills x1, x2, x3 of a converged solution for the given time.
void wave_positions(RiemannSolution& sol, double t, double x_dam);

// Least-squares slope of log(y) vs log(x) over positive samples.
double loglog_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct SensitivityReport {
  double slope_dhm;  // slope of log|d h_m / d hR| vs log hR, expected -1/2
  double slope_hm;   // slope of log h_m vs log hR, expected +1/2
  Eigen::VectorXd hR_samples;
  Eigen::VectorXd dhm_dhR;  // central finite-difference estimates
};
SensitivityReport sensitivity_slope(double hL, double g,
                                    const Eigen::VectorXd& hR_samples);

}  // namespace trom
