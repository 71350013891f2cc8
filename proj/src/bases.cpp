#include "trom/bases.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trom {

std::string to_string(RomMethod m) {
  switch (m) {
    case RomMethod::Interp: return "interp";
    case RomMethod::NonInterp: return "noninterp";
    case RomMethod::Pod: return "pod";
  }
  return "?";
}

RomMethod rom_method_from_string(const std::string& s) {
  if (s == "interp") return RomMethod::Interp;
  if (s == "noninterp") return RomMethod::NonInterp;
  if (s == "pod") return RomMethod::Pod;
  throw ValidationError("unknown ROM method: " + s);
}

InterpolationVector lagrange_weights(const Eigen::VectorXd& nodes,
                                     double x_star, int p) {
  const int n = static_cast<int>(nodes.size());
  if (p < 1 || p > n)
    throw ValidationError("lagrange_weights: need 1 <= p <= node count");
  if (x_star < nodes[0] || x_star > nodes[n - 1])
    throw ValidationError("lagrange_weights: x_star outside the node range");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(nodes[a] - x_star) < std::abs(nodes[b] - x_star);
  });
  std::vector<int> support(order.begin(), order.begin() + p);
  std::sort(support.begin(), support.end());

  InterpolationVector out;
  out.weights = Eigen::VectorXd::Zero(n);
  out.support = support;
  out.order = p;
  for (int k : support) {
    double w = 1.0;
    for (int m : support)
      if (m != k) w *= (nodes[m] - x_star) / (nodes[m] - nodes[k]);
    out.weights[k] = w;
  }
  return out;
}

Eigen::Index select_rank(const Eigen::VectorXd& sigma, double eps_loc) {
  const Eigen::Index n = sigma.size();
  if (n == 0) throw ValidationError("select_rank: empty sigma");
  const double s1 = sigma[0];
  if (s1 <= 0.0) return 1;  // all-zero spectrum

  Eigen::Index eff = n;
  while (eff > 1 && sigma[eff - 1] < 1e-14 * s1) --eff;

  double total = 0.0;
  for (Eigen::Index k = 0; k < eff; ++k) total += sigma[k] * sigma[k];
  const double allowed = eps_loc * eps_loc * total;

  double tail = 0.0;
  Eigen::Index rank = eff;
  while (rank > 1) {
    const double next = tail + sigma[rank - 1] * sigma[rank - 1];
    if (next > allowed) break;
    tail = next;
    --rank;
  }
  return rank;
}

namespace {

// Fix SVD sign ambiguity: make each column's largest-magnitude entry positive.
void normalize_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax;
    v.col(j).cwiseAbs().maxCoeff(&imax);
    if (v(imax, j) < 0.0) v.col(j) = -v.col(j);
  }
}

BasisFactor basis_from_local_core(const TuckerModel& model,
                                  const Eigen::MatrixXd& local_core,
                                  double eps_loc) {
  const ThinSvd svd = thin_svd(local_core);
  const Eigen::Index rank = select_rank(svd.sigma, eps_loc);
  BasisFactor out;
  out.V = model.factors[0] * svd.U.leftCols(rank);
  out.sigma = svd.sigma;
  normalize_signs(out.V);
  return out;
}

}  // namespace

BasisFactor interp_local_basis(const TuckerModel& model,
                               const ParameterGrid& grid,
                               const ParameterPair& mu_star, int p,
                               double eps_loc) {
  const InterpolationVector chi_l =
      lagrange_weights(grid.hL_nodes, mu_star.hL, p);
  const InterpolationVector chi_r =
      lagrange_weights(grid.hR_nodes, mu_star.hR, p);
  // The interpolation vectors live on the parameter nodes; pushing them
  // through the parameter factors gives the contraction weights for the core.
  const Eigen::RowVectorXd w2 =
      chi_l.weights.transpose() * model.factors[1];
  const Eigen::RowVectorXd w3 =
      chi_r.weights.transpose() * model.factors[2];
  return basis_from_local_core(model, contract_modes23(model.core, w2, w3),
                               eps_loc);
}

Bracket bracket_indices(const Eigen::VectorXd& nodes, double x_star) {
  const int n = static_cast<int>(nodes.size());
  if (n < 2) throw ValidationError("bracket_indices: need >= 2 nodes");
  if (x_star < nodes[0] || x_star > nodes[n - 1])
    throw ValidationError("bracket_indices: x_star outside the node range");
  if (x_star >= nodes[n - 1]) return {n - 2, n - 1};
  int low = 0;
  while (low + 1 < n && nodes[low + 1] <= x_star) ++low;
  return {low, low + 1};
}

BasisFactor noninterp_local_basis(const TuckerModel& model,
                                  const ParameterGrid& grid,
                                  const ParameterPair& mu_star,
                                  double eps_loc) {
  const Bracket bl = bracket_indices(grid.hL_nodes, mu_star.hL);
  const Bracket br = bracket_indices(grid.hR_nodes, mu_star.hR);

  const Eigen::Index nt = model.core.dim(3);
  Eigen::MatrixXd c(model.core.dim(0), 4 * nt);
  int block = 0;
  for (int k : {bl.low, bl.high})
    for (int l : {br.low, br.high}) {
      c.middleCols(block * nt, nt) =
          contract_modes23(model.core, model.factors[1].row(k),
                           model.factors[2].row(l));
      ++block;
    }
  return basis_from_local_core(model, c, eps_loc);
}

BasisFactor pod_global_basis(const Eigen::MatrixXd& snapshots,
                             Eigen::Index fixed_rank, double eps_pod) {
  if (snapshots.size() == 0)
    throw ValidationError("pod_global_basis: empty snapshot matrix");
  const ThinSvd svd = thin_svd(snapshots);

  Eigen::Index eff = svd.sigma.size();
  while (eff > 1 && svd.sigma[eff - 1] < 1e-14 * svd.sigma[0]) --eff;

  Eigen::Index rank;
  if (fixed_rank > 0) {
    rank = std::min(fixed_rank, eff);  // clip to numerical rank
  } else {
    if (!(eps_pod > 0.0))
      throw ValidationError("pod_global_basis: need a rank or a threshold");
    const double total = svd.sigma.head(eff).squaredNorm();
    double kept = 0.0;
    rank = eff;
    for (Eigen::Index k = 0; k < eff; ++k) {
      kept += svd.sigma[k] * svd.sigma[k];
      if (kept >= (1.0 - eps_pod) * total) {
        rank = k + 1;
        break;
      }
    }
  }
  BasisFactor out;
  out.V = svd.U.leftCols(rank);
  out.sigma = svd.sigma;
  normalize_signs(out.V);
  return out;
}

}  // namespace trom
