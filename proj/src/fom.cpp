#include "trom/fom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trom {

void RunConfig::validate() const {
  if (!(g > 0.0)) throw ValidationError("RunConfig: g must be positive");
  if (!(Lx > 0.0)) throw ValidationError("RunConfig: Lx must be positive");
  if (Nx < 4) throw ValidationError("RunConfig: Nx must be >= 4");
  if (!(x_dam > 0.0 && x_dam < Lx))
    throw ValidationError("RunConfig: x_dam must lie strictly inside (0, Lx)");
  if (!(T > 0.0)) throw ValidationError("RunConfig: T must be positive");
  if (!(cfl > 0.0 && cfl < 1.0))
    throw ValidationError("RunConfig: cfl must lie in (0, 1)");
  if (snapshot_count < 2)
    throw ValidationError("RunConfig: snapshot_count must be >= 2");
}

SpatialGrid SpatialGrid::make(const RunConfig& cfg) {
  cfg.validate();
  SpatialGrid grid;
  grid.dx = cfg.Lx / cfg.Nx;
  grid.centers.resize(cfg.Nx);
  for (int i = 0; i < cfg.Nx; ++i) grid.centers[i] = (i + 1) * grid.dx;
  return grid;
}

void ParameterPair::validate() const {
  if (!(hL > hR && hR >= 0.0))
    throw ValidationError("ParameterPair: requires hL > hR >= 0, got hL=" +
                          std::to_string(hL) + " hR=" + std::to_string(hR));
}

FluxPair llf_flux(double hl, double ql, double hr, double qr, double g) {
  if (hl < 0.0 || hr < 0.0)
    throw ValidationError("llf_flux: negative depth input");
  const double ul = hl > kDryDepth ? ql / hl : 0.0;
  const double ur = hr > kDryDepth ? qr / hr : 0.0;
  const double cl = std::sqrt(g * hl);
  const double cr = std::sqrt(g * hr);
  const double lambda = std::max(std::abs(ul) + cl, std::abs(ur) + cr);
  const double fql = (hl > kDryDepth ? ql * ql / hl : 0.0) + 0.5 * g * hl * hl;
  const double fqr = (hr > kDryDepth ? qr * qr / hr : 0.0) + 0.5 * g * hr * hr;
  return {0.5 * (ql + qr) - 0.5 * lambda * (hr - hl),
          0.5 * (fql + fqr) - 0.5 * lambda * (qr - ql)};
}

RhsEval flux_divergence(const Eigen::VectorXd& h, const Eigen::VectorXd& q,
                        double dx, double g) {
  const Eigen::Index n = h.size();
  RhsEval out;
  out.dh.resize(n);
  out.dq.resize(n);
  out.lambda_max = 0.0;

  // Interface fluxes, with outflow ghost cells copying the nearest interior
  // state: interfaces 0..n, where 0 and n see equal left/right states.
  double prev_fh = 0.0, prev_fq = 0.0;
  for (Eigen::Index f = 0; f <= n; ++f) {
    const Eigen::Index il = f == 0 ? 0 : f - 1;
    const Eigen::Index ir = f == n ? n - 1 : f;
    const FluxPair flx = llf_flux(h[il], q[il], h[ir], q[ir], g);
    const double ul = h[il] > kDryDepth ? q[il] / h[il] : 0.0;
    const double ur = h[ir] > kDryDepth ? q[ir] / h[ir] : 0.0;
    out.lambda_max =
        std::max(out.lambda_max,
                 std::max(std::abs(ul) + std::sqrt(g * h[il]),
                          std::abs(ur) + std::sqrt(g * h[ir])));
    if (f == 0) out.mass_flux_left = flx.fh;
    if (f == n) out.mass_flux_right = flx.fh;
    if (f > 0) {
      out.dh[f - 1] = -(flx.fh - prev_fh) / dx;
      out.dq[f - 1] = -(flx.fq - prev_fq) / dx;
    }
    prev_fh = flx.fh;
    prev_fq = flx.fq;
  }
  return out;
}

FieldState dam_break_ic(const SpatialGrid& grid, const ParameterPair& mu,
                        double x_dam) {
  mu.validate();
  FieldState s;
  const Eigen::Index n = grid.centers.size();
  s.h.resize(n);
  s.q = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s.h[i] = grid.centers[i] < x_dam ? mu.hL : mu.hR;
  s.t = 0.0;
  return s;
}

namespace {

void clip_dry(Eigen::VectorXd& h, Eigen::VectorXd& q) {
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (h[i] < 0.0) h[i] = 0.0;
    if (h[i] < kDryDepth) q[i] = 0.0;
  }
}

}  // namespace

StepResult fom_step_detailed(const FieldState& state, double dt,
                             const SpatialGrid& grid, double g) {
  if (!(dt > 0.0)) throw ValidationError("fom_step: dt must be positive");
  const RhsEval r1 = flux_divergence(state.h, state.q, grid.dx, g);
  if (r1.lambda_max * dt / grid.dx >= 1.0)
    throw NumericalError("fom_step: CFL violation at t=" +
                         std::to_string(state.t));

  Eigen::VectorXd h_star = state.h + dt * r1.dh;
  Eigen::VectorXd q_star = state.q + dt * r1.dq;
  clip_dry(h_star, q_star);

  const RhsEval r2 = flux_divergence(h_star, q_star, grid.dx, g);
  if (r2.lambda_max * dt / grid.dx >= 1.0)
    throw NumericalError("fom_step: CFL violation in corrector at t=" +
                         std::to_string(state.t));

  StepResult out;
  out.state.h = 0.5 * (state.h + h_star + dt * r2.dh);
  out.state.q = 0.5 * (state.q + q_star + dt * r2.dq);
  clip_dry(out.state.h, out.state.q);
  out.state.t = state.t + dt;
  out.mass_flux_left = 0.5 * (r1.mass_flux_left + r2.mass_flux_left);
  out.mass_flux_right = 0.5 * (r1.mass_flux_right + r2.mass_flux_right);
  out.lambda_max = std::max(r1.lambda_max, r2.lambda_max);
  return out;
}

FieldState fom_step(const FieldState& state, double dt, const SpatialGrid& grid,
                    double g) {
  return fom_step_detailed(state, dt, grid, g).state;
}

TimeSchedule make_schedule(const ParameterPair& mu, const RunConfig& cfg) {
  cfg.validate();
  mu.validate();
  // Wave-speed bound from the initial data (q = 0), doubled to cover the
  // dry-bed front speed 2*sqrt(g*hL).
  const double lambda0 = std::sqrt(cfg.g * mu.hL);
  const double dx = cfg.Lx / cfg.Nx;
  const double dt_raw = cfg.cfl * dx / (2.0 * lambda0);
  int n_steps = static_cast<int>(std::ceil(cfg.T / dt_raw));
  n_steps = std::max(n_steps, cfg.snapshot_count - 1);

  TimeSchedule sched;
  sched.dt = cfg.T / n_steps;
  sched.n_steps = n_steps;
  sched.snapshot_steps.resize(cfg.snapshot_count);
  for (int j = 0; j < cfg.snapshot_count; ++j)
    sched.snapshot_steps[j] = static_cast<int>(
        std::llround(static_cast<double>(j) * n_steps /
                     (cfg.snapshot_count - 1)));
  return sched;
}

Trajectory run_fom(const ParameterPair& mu, const RunConfig& cfg) {
  const SpatialGrid grid = SpatialGrid::make(cfg);
  const TimeSchedule sched = make_schedule(mu, cfg);

  FieldState state = dam_break_ic(grid, mu, cfg.x_dam);
  Trajectory traj;
  traj.times.reserve(cfg.snapshot_count);
  traj.states.reserve(cfg.snapshot_count);

  std::size_t next_snap = 0;
  auto maybe_store = [&](int step) {
    while (next_snap < sched.snapshot_steps.size() &&
           sched.snapshot_steps[next_snap] == step) {
      traj.times.push_back(state.t);
      traj.states.push_back(state);
      ++next_snap;
    }
  };
  maybe_store(0);

  for (int step = 1; step <= sched.n_steps; ++step) {
    state = fom_step(state, sched.dt, grid, cfg.g);
    if (!state.h.allFinite() || !state.q.allFinite())
      throw NumericalError("run_fom: divergence (NaN/Inf) at step " +
                           std::to_string(step));
    maybe_store(step);
  }
  return traj;
}

}  // namespace trom
