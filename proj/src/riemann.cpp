#include "trom/riemann.hpp"

#include <cmath>
#include <string>

namespace trom {

namespace {

struct MiddleEval {
  double h_m;
  double u_m;
  double phi;   // Riemann-invariant residual u_m + 2 sqrt(g h_m) - 2c
  double dphi;  // d phi / d s
};

MiddleEval eval_middle(double s, double hL, double hR, double g) {
  const double c = std::sqrt(g * hL);
  const double R = std::sqrt(1.0 + 8.0 * s * s / (g * hR));
  const double h_m = 0.5 * hR * (R - 1.0);
  const double u_m = s - g * hR / (4.0 * s) * (R + 1.0);

  const double dR = 8.0 * s / (g * hR * R);
  const double dh_m = 0.5 * hR * dR;
  const double du_m =
      1.0 + g * hR * (R + 1.0) / (4.0 * s * s) - g * hR / (4.0 * s) * dR;

  MiddleEval out;
  out.h_m = h_m;
  out.u_m = u_m;
  out.phi = u_m + 2.0 * std::sqrt(g * h_m) - 2.0 * c;
  out.dphi = du_m + std::sqrt(g / h_m) * dh_m;
  return out;
}

double bisect_shock_speed(double hL, double hR, double g, double tol) {
  double lo = std::sqrt(g * hR) * (1.0 + 1e-14);
  double hi = 4.0 * std::sqrt(g * hL);
  // phi is increasing in s: phi(lo) < 0 < phi(hi) for hL > hR.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double phi = eval_middle(mid, hL, hR, g).phi;
    if (std::abs(phi) <= tol) return mid;
    (phi < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PointValue dry_bed_solution(double x, double t, double hL, double g,
                            double x_dam) {
  if (!(hL > 0.0)) throw ValidationError("dry_bed_solution: hL must be > 0");
  if (t < 0.0) throw ValidationError("dry_bed_solution: t must be >= 0");
  if (t == 0.0) return {0.0, x < x_dam ? hL : 0.0};

  const double c = std::sqrt(g * hL);
  const double xl = x_dam - c * t;
  const double xr = x_dam + 2.0 * c * t;
  if (x < xl) return {0.0, hL};
  if (x > xr) return {0.0, 0.0};
  const double delta = (x - x_dam) / t;
  const double root = c - 0.5 * delta;
  return {2.0 / 3.0 * (c + delta), 4.0 / (9.0 * g) * root * root};
}

RiemannSolution solve_middle_state(double hL, double hR, double g, double tol,
                                   int max_iter) {
  if (hR <= 0.0)
    throw ValidationError(
        "solve_middle_state: hR must be > 0; use dry_bed_solution for hR = 0");
  if (!(hL > hR))
    throw ValidationError("solve_middle_state: requires hL > hR");

  const double c = std::sqrt(g * hL);
  double s = c;  // initial guess
  MiddleEval ev = eval_middle(s, hL, hR, g);
  bool converged = std::abs(ev.phi) <= tol;
  for (int it = 0; it < max_iter && !converged; ++it) {
    const double s_next = s - ev.phi / ev.dphi;
    // Keep the iterate in the physical range (s > c_R); otherwise bail out
    // to bisection below.
    if (!(s_next > std::sqrt(g * hR)) || !std::isfinite(s_next)) break;
    s = s_next;
    ev = eval_middle(s, hL, hR, g);
    converged = std::abs(ev.phi) <= tol;
  }
  if (!converged) {
    s = bisect_shock_speed(hL, hR, g, tol);
    ev = eval_middle(s, hL, hR, g);
    if (std::abs(ev.phi) > tol)
      throw NumericalError("solve_middle_state: no convergence, residual " +
                           std::to_string(ev.phi));
  }

  RiemannSolution sol;
  sol.s = s;
  sol.h_m = ev.h_m;
  sol.u_m = ev.u_m;
  sol.c = c;
  sol.c_m = std::sqrt(g * ev.h_m);
  sol.residual = ev.phi;
  return sol;
}

void wave_positions(RiemannSolution& sol, double t, double x_dam) {
  sol.x1 = x_dam - sol.c * t;
  sol.x2 = x_dam + (sol.u_m - sol.c_m) * t;
  sol.x3 = x_dam + sol.s * t;
}

PointValue wet_bed_solution(double x, double t, double hL, double hR, double g,
                            double x_dam) {
  if (!(hR > 0.0)) throw ValidationError("wet_bed_solution: hR must be > 0");
  if (t < 0.0) throw ValidationError("wet_bed_solution: t must be >= 0");
  if (t == 0.0) return {0.0, x < x_dam ? hL : hR};

  RiemannSolution sol = solve_middle_state(hL, hR, g);
  wave_positions(sol, t, x_dam);
  if (x <= sol.x1) return {0.0, hL};
  if (x > sol.x3) return {0.0, hR};
  if (x >= sol.x2) return {sol.u_m, sol.h_m};
  const double delta = (x - x_dam) / t;
  const double root = sol.c - 0.5 * delta;
  return {2.0 / 3.0 * (sol.c + delta), 4.0 / (9.0 * g) * root * root};
}

double loglog_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("loglog_slope: need >= 2 matching samples");
  const Eigen::Index n = x.size();
  Eigen::VectorXd lx(n), ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(x[i] > 0.0)) throw ValidationError("loglog_slope: x must be > 0");
    lx[i] = std::log(x[i]);
    // A zero sample would make the fit undefined; clamp far below everything
    // of interest so degenerate (constant-zero) inputs yield slope ~ 0.
    ly[i] = std::log(std::max(std::abs(y[i]), 1e-300));
  }
  const double mx = lx.mean();
  const double my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  return sxy / sxx;
}

SensitivityReport sensitivity_slope(double hL, double g,
                                    const Eigen::VectorXd& hR_samples) {
  const Eigen::Index n = hR_samples.size();
  if (n < 4)
    throw ValidationError("sensitivity_slope: need >= 4 samples");
  double lo = hR_samples.minCoeff(), hi = hR_samples.maxCoeff();
  if (!(lo > 0.0) || hi >= hL / 10.0)
    throw ValidationError("sensitivity_slope: samples must lie in (0, hL/10)");
  if (hi / lo < 100.0)
    throw ValidationError("sensitivity_slope: samples must span >= 2 decades");

  SensitivityReport rep;
  rep.hR_samples = hR_samples;
  rep.dhm_dhR.resize(n);
  Eigen::VectorXd hm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hR = hR_samples[i];
    const double step = 1e-3 * hR;
    const double hm_p = solve_middle_state(hL, hR + step, g).h_m;
    const double hm_n = solve_middle_state(hL, hR - step, g).h_m;
    rep.dhm_dhR[i] = (hm_p - hm_n) / (2.0 * step);
    hm[i] = solve_middle_state(hL, hR, g).h_m;
  }
  rep.slope_dhm = loglog_slope(hR_samples, rep.dhm_dhR);
  rep.slope_hm = loglog_slope(hR_samples, hm);
  return rep;
}

}  // namespace trom
