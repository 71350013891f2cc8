#include "trom/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace trom {

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
  const std::size_t n = times.size();
  if (n < 2) throw ValidationError("metrics: need >= 2 snapshot times");
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double half = 0.5 * (times[j + 1] - times[j]);
    w[j] += half;
    w[j + 1] += half;
  }
  return w;
}

double l2_sq(const Eigen::VectorXd& v, double dx) {
  return v.squaredNorm() * dx;
}

double h1_sq(const Eigen::VectorXd& v, double dx) {
  double out = v.squaredNorm() * dx;
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    const double d = (v[i + 1] - v[i]) / dx;
    out += d * d * dx;
  }
  return out;
}

template <typename NormSq>
double rel_error(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& fom,
                 const std::vector<double>& times, double dx, NormSq norm_sq) {
  if (rom.rows() != fom.rows() || rom.cols() != fom.cols() ||
      static_cast<std::size_t>(fom.cols()) != times.size())
    throw ValidationError("metrics: mismatched trajectory shapes");
  const std::vector<double> w = trapezoid_weights(times);
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < fom.cols(); ++j) {
    num += w[j] * norm_sq(Eigen::VectorXd(rom.col(j) - fom.col(j)), dx);
    den += w[j] * norm_sq(Eigen::VectorXd(fom.col(j)), dx);
  }
  if (den == 0.0)
    throw ValidationError("metrics: identically zero reference trajectory");
  return std::sqrt(num / den);
}

}  // namespace

double rel_error_l2l2(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& fom,
                      const std::vector<double>& times, double dx) {
  return rel_error(rom, fom, times, dx,
                   [](const Eigen::VectorXd& v, double d) { return l2_sq(v, d); });
}

double rel_error_l2h1(const Eigen::MatrixXd& rom, const Eigen::MatrixXd& fom,
                      const std::vector<double>& times, double dx) {
  return rel_error(rom, fom, times, dx,
                   [](const Eigen::VectorXd& v, double d) { return h1_sq(v, d); });
}

Eigen::MatrixXd trajectory_field_h(const Trajectory& traj) {
  const Eigen::Index nt = static_cast<Eigen::Index>(traj.states.size());
  if (nt == 0) throw ValidationError("trajectory_field_h: empty trajectory");
  Eigen::MatrixXd out(traj.states[0].h.size(), nt);
  for (Eigen::Index j = 0; j < nt; ++j) out.col(j) = traj.states[j].h;
  return out;
}

Eigen::MatrixXd trajectory_field_q(const Trajectory& traj) {
  const Eigen::Index nt = static_cast<Eigen::Index>(traj.states.size());
  if (nt == 0) throw ValidationError("trajectory_field_q: empty trajectory");
  Eigen::MatrixXd out(traj.states[0].q.size(), nt);
  for (Eigen::Index j = 0; j < nt; ++j) out.col(j) = traj.states[j].q;
  return out;
}

AggregateReport aggregate(const std::vector<ErrorReport>& all,
                          AggregateMode mode) {
  std::vector<ErrorReport> errs;
  errs.reserve(all.size());
  for (const ErrorReport& e : all)
    if (!e.failed) errs.push_back(e);
  if (errs.empty()) throw ValidationError("aggregate: empty report list");
  AggregateReport out;
  out.sample_count = errs.size();
  for (const ErrorReport& e : errs) {
    out.sup_l2l2 = std::max(out.sup_l2l2, e.e_l2l2);
    out.sup_l2h1 = std::max(out.sup_l2h1, e.e_l2h1);
    out.mean_rank_h += static_cast<double>(e.rank_h);
    out.mean_rank_q += static_cast<double>(e.rank_q);
    out.max_rank_h = std::max(out.max_rank_h, e.rank_h);
    out.max_rank_q = std::max(out.max_rank_q, e.rank_q);
  }
  out.mean_rank_h /= static_cast<double>(errs.size());
  out.mean_rank_q /= static_cast<double>(errs.size());

  if (mode == AggregateMode::OverHr && errs.size() > 1) {
    // Normalized trapezoidal mean in hR, approximating the integral aggregate.
    std::vector<double> hr(errs.size());
    for (std::size_t i = 0; i < errs.size(); ++i) hr[i] = errs[i].mu.hR;
    if (!std::is_sorted(hr.begin(), hr.end()))
      throw ValidationError("aggregate: hR sweep must be sorted by hR");
    const double span = hr.back() - hr.front();
    if (span <= 0.0)
      throw ValidationError("aggregate: degenerate hR sweep");
    double i2 = 0.0, ih = 0.0;
    for (std::size_t j = 0; j + 1 < errs.size(); ++j) {
      const double half = 0.5 * (hr[j + 1] - hr[j]);
      i2 += half * (errs[j].e_l2l2 + errs[j + 1].e_l2l2);
      ih += half * (errs[j].e_l2h1 + errs[j + 1].e_l2h1);
    }
    out.avg_l2l2 = i2 / span;
    out.avg_l2h1 = ih / span;
    out.rule = "trapezoid-hR";
  } else {
    for (const ErrorReport& e : errs) {
      out.avg_l2l2 += e.e_l2l2;
      out.avg_l2h1 += e.e_l2h1;
    }
    out.avg_l2l2 /= static_cast<double>(errs.size());
    out.avg_l2h1 /= static_cast<double>(errs.size());
    out.rule = "mean";
  }
  return out;
}

}  // namespace trom
