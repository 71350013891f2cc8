#include "trom/rom.hpp"

#include <cmath>
#include <string>

namespace trom {

namespace {

// RHS of the semi-discretization evaluated on the lifted state, with the
// FOM's dry-cell rule applied to a copy. Basis truncation can leave near-dry
// cells with almost no depth but finite momentum, whose velocity q/h (and
// hence the LLF wave speed) is unbounded even though the exact solution's
// speed never exceeds 2*sqrt(g*hL). The momentum of such cells is capped so
// the local wave speed stays within the step's CFL budget; physical states
// are far below the cap and pass through unchanged.
RhsEval lifted_rhs(const Eigen::VectorXd& h, const Eigen::VectorXd& q,
                   const SpatialGrid& grid, double dt, double g) {
  Eigen::VectorXd hc = h;
  Eigen::VectorXd qc = q;
  const double speed_budget = 0.95 * grid.dx / dt;
  for (Eigen::Index i = 0; i < hc.size(); ++i) {
    if (hc[i] < 0.0) hc[i] = 0.0;
    if (hc[i] < kDryDepth) {
      qc[i] = 0.0;
      continue;
    }
    const double u_cap = speed_budget - std::sqrt(g * hc[i]);
    const double q_cap = u_cap > 0.0 ? hc[i] * u_cap : 0.0;
    if (qc[i] > q_cap) qc[i] = q_cap;
    if (qc[i] < -q_cap) qc[i] = -q_cap;
  }
  return flux_divergence(hc, qc, grid.dx, g);
}

}  // namespace

Coefficients project_ic(const FieldState& state, const LocalBasis& basis) {
  if (basis.Vh.rows() != state.h.size() || basis.Vq.rows() != state.q.size())
    throw ValidationError("project_ic: basis/state dimension mismatch");
  return {basis.Vh.transpose() * state.h, basis.Vq.transpose() * state.q};
}

Coefficients rom_step(const Coefficients& alpha, const LocalBasis& basis,
                      const SpatialGrid& grid, double dt, double g) {
  const Eigen::VectorXd h0 = basis.Vh * alpha.alpha_h;
  const Eigen::VectorXd q0 = basis.Vq * alpha.alpha_q;
  if (!h0.allFinite() || !q0.allFinite())
    throw NumericalError("rom_step: non-finite lifted state");

  const RhsEval r1 = lifted_rhs(h0, q0, grid, dt, g);

  Coefficients star;
  star.alpha_h = alpha.alpha_h + dt * (basis.Vh.transpose() * r1.dh);
  star.alpha_q = alpha.alpha_q + dt * (basis.Vq.transpose() * r1.dq);

  const Eigen::VectorXd h1 = basis.Vh * star.alpha_h;
  const Eigen::VectorXd q1 = basis.Vq * star.alpha_q;
  if (!h1.allFinite() || !q1.allFinite())
    throw NumericalError("rom_step: non-finite predictor state");
  const RhsEval r2 = lifted_rhs(h1, q1, grid, dt, g);

  Coefficients out;
  out.alpha_h = 0.5 * (alpha.alpha_h + star.alpha_h +
                       dt * (basis.Vh.transpose() * r2.dh));
  out.alpha_q = 0.5 * (alpha.alpha_q + star.alpha_q +
                       dt * (basis.Vq.transpose() * r2.dq));
  return out;
}

FieldState reconstruct_state(const Coefficients& alpha,
                             const LocalBasis& basis) {
  FieldState s;
  s.h = basis.Vh * alpha.alpha_h;
  s.q = basis.Vq * alpha.alpha_q;
  return s;
}

RomTrajectory run_rom(const ParameterPair& mu_star, const LocalBasis& basis,
                      const RunConfig& cfg) {
  const SpatialGrid grid = SpatialGrid::make(cfg);
  const TimeSchedule sched = make_schedule(mu_star, cfg);
  const FieldState ic = dam_break_ic(grid, mu_star, cfg.x_dam);
  Coefficients alpha = project_ic(ic, basis);

  RomTrajectory traj;
  traj.times.reserve(cfg.snapshot_count);
  traj.alpha_h.resize(cfg.snapshot_count, basis.rank_h());
  traj.alpha_q.resize(cfg.snapshot_count, basis.rank_q());

  std::size_t next_snap = 0;
  double t = 0.0;
  auto maybe_store = [&](int step) {
    while (next_snap < sched.snapshot_steps.size() &&
           sched.snapshot_steps[next_snap] == step) {
      traj.times.push_back(t);
      traj.alpha_h.row(static_cast<Eigen::Index>(next_snap)) =
          alpha.alpha_h.transpose();
      traj.alpha_q.row(static_cast<Eigen::Index>(next_snap)) =
          alpha.alpha_q.transpose();
      ++next_snap;
    }
  };
  maybe_store(0);

  for (int step = 1; step <= sched.n_steps; ++step) {
    try {
      alpha = rom_step(alpha, basis, grid, sched.dt, cfg.g);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at step " +
                           std::to_string(step));
    }
    t = step * sched.dt;
    if (!alpha.alpha_h.allFinite() || !alpha.alpha_q.allFinite())
      throw NumericalError("run_rom: divergence at step " +
                           std::to_string(step));
    maybe_store(step);
  }
  return traj;
}

Eigen::MatrixXd rom_field_h(const RomTrajectory& traj,
                            const LocalBasis& basis) {
  return basis.Vh * traj.alpha_h.transpose();
}

Eigen::MatrixXd rom_field_q(const RomTrajectory& traj,
                            const LocalBasis& basis) {
  return basis.Vq * traj.alpha_q.transpose();
}

}  // namespace trom
