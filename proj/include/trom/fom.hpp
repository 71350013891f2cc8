#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trom/errors.hpp"

namespace trom {

/// Finite-volume full-order solver for the 1D shallow-water equations with
/// dam-break initial data, local Lax-Friedrichs fluxes, Heun (RK-2) time
/// stepping and outflow boundaries.

struct RunConfig {
  double g = 9.81;        // gravitational acceleration [m/s^2]
  double Lx = 100.0;      // domain length [m]
  int Nx = 400;           // interior cell count
  double x_dam = 50.0;    // dam position [m]
  double T = 1.4;         // final time [s]
  double cfl = 0.9;       // Courant number
  int snapshot_count = 101;  // stored time levels N_T

  void validate() const;
};

struct SpatialGrid {
  double dx = 0.0;
  Eigen::VectorXd centers;  // x_i = i*dx, i = 1..Nx

  static SpatialGrid make(const RunConfig& cfg);
};

struct ParameterPair {
  double hL = 0.0;  // left depth [m]
  double hR = 0.0;  // right depth [m]

  void validate() const;  // requires hL > hR >= 0
};

struct FieldState {
  Eigen::VectorXd h;  // depth, length Nx
  Eigen::VectorXd q;  // discharge, length Nx
  double t = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FieldState> states;
};

struct FluxPair {
  double fh;
  double fq;
};

// LLF interface flux between left state (hl, ql) and right state (hr, qr).
FluxPair llf_flux(double hl, double ql, double hr, double qr, double g);

// Negative flux divergence of the semi-discretization with outflow ghost cells.
struct RhsEval {
  Eigen::VectorXd dh;
  Eigen::VectorXd dq;
  double mass_flux_left;   // F_h at the left domain boundary
  double mass_flux_right;  // F_h at the right domain boundary
  double lambda_max;       // max interface wave speed
};
RhsEval flux_divergence(const Eigen::VectorXd& h, const Eigen::VectorXd& q,
                        double dx, double g);

FieldState dam_break_ic(const SpatialGrid& grid, const ParameterPair& mu,
                        double x_dam);

// One Heun step. Boundary mass fluxes are averaged over the two stages so
// that sum_i (h' - h) dx = -dt (mass_flux_right - mass_flux_left).
struct StepResult {
  FieldState state;
  double mass_flux_left;
  double mass_flux_right;
  double lambda_max;
};
StepResult fom_step_detailed(const FieldState& state, double dt,
                             const SpatialGrid& grid, double g);
FieldState fom_step(const FieldState& state, double dt, const SpatialGrid& grid,
                    double g);

// Constant-dt schedule shared by the FOM and the ROM at the same mu.
struct TimeSchedule {
  double dt;
  int n_steps;
  std::vector<int> snapshot_steps;  // length snapshot_count, first 0, last n_steps
};
TimeSchedule make_schedule(const ParameterPair& mu, const RunConfig& cfg);

Trajectory run_fom(const ParameterPair& mu, const RunConfig& cfg);

// Depth below this is treated as dry: q zeroed, momentum flux term dropped.
inline constexpr double kDryDepth = 1e-12;

}  // namespace trom
