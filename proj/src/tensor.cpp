#include "trom/tensor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace trom {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 4)
    throw ValidationError("tensor mode out of range: " + std::to_string(mode));
}

}  // namespace

Eigen::MatrixXd unfold(const Tensor4& t, int mode) {
  check_mode(mode);
  const auto& d = t.dims();
  const int m = mode - 1;
  // Remaining dims in increasing order.
  std::array<int, 3> rest{};
  for (int k = 0, r = 0; k < 4; ++k)
    if (k != m) rest[r++] = k;

  Eigen::MatrixXd out(d[m], d[rest[0]] * d[rest[1]] * d[rest[2]]);
  std::array<Eigen::Index, 4> idx{};
  for (Eigen::Index row = 0; row < d[m]; ++row) {
    idx[m] = row;
    Eigen::Index col = 0;
    for (idx[rest[0]] = 0; idx[rest[0]] < d[rest[0]]; ++idx[rest[0]])
      for (idx[rest[1]] = 0; idx[rest[1]] < d[rest[1]]; ++idx[rest[1]])
        for (idx[rest[2]] = 0; idx[rest[2]] < d[rest[2]]; ++idx[rest[2]])
          out(row, col++) = t(idx[0], idx[1], idx[2], idx[3]);
  }
  return out;
}

Tensor4 fold(const Eigen::MatrixXd& m, int mode, Tensor4::Dims dims) {
  check_mode(mode);
  const int mm = mode - 1;
  std::array<int, 3> rest{};
  for (int k = 0, r = 0; k < 4; ++k)
    if (k != mm) rest[r++] = k;
  if (m.rows() != dims[mm] ||
      m.cols() != dims[rest[0]] * dims[rest[1]] * dims[rest[2]])
    throw ValidationError("fold: matrix shape inconsistent with target dims");

  Tensor4 out(dims);
  std::array<Eigen::Index, 4> idx{};
  for (Eigen::Index row = 0; row < dims[mm]; ++row) {
    idx[mm] = row;
    Eigen::Index col = 0;
    for (idx[rest[0]] = 0; idx[rest[0]] < dims[rest[0]]; ++idx[rest[0]])
      for (idx[rest[1]] = 0; idx[rest[1]] < dims[rest[1]]; ++idx[rest[1]])
        for (idx[rest[2]] = 0; idx[rest[2]] < dims[rest[2]]; ++idx[rest[2]])
          out(idx[0], idx[1], idx[2], idx[3]) = m(row, col++);
  }
  return out;
}

Tensor4 mode_product(const Tensor4& t, const Eigen::MatrixXd& m, int mode) {
  check_mode(mode);
  if (m.cols() != t.dim(mode - 1))
    throw ValidationError("mode_product: dimension mismatch in mode " +
                          std::to_string(mode));
  Tensor4::Dims dims = t.dims();
  dims[mode - 1] = m.rows();
  return fold(m * unfold(t, mode), mode, dims);
}

Eigen::MatrixXd contract_modes23(const Tensor4& t, const Eigen::RowVectorXd& w2,
                                 const Eigen::RowVectorXd& w3) {
  if (w2.size() != t.dim(1) || w3.size() != t.dim(2))
    throw ValidationError("contract_modes23: weight length mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.dim(0), t.dim(3));
  for (Eigen::Index i2 = 0; i2 < t.dim(1); ++i2)
    for (Eigen::Index i3 = 0; i3 < t.dim(2); ++i3) {
      const double w = w2[i2] * w3[i3];
      if (w == 0.0) continue;
      for (Eigen::Index i1 = 0; i1 < t.dim(0); ++i1)
        for (Eigen::Index i4 = 0; i4 < t.dim(3); ++i4)
          out(i1, i4) += w * t(i1, i2, i3, i4);
    }
  return out;
}

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw ValidationError("thin_svd: non-finite input");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

TuckerModel hosvd_truncate(const Tensor4& q, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ValidationError("hosvd_truncate: eps must lie in (0, 1)");
  if (!q.allFinite()) throw ValidationError("hosvd_truncate: non-finite input");

  TuckerModel model;
  model.eps = eps;
  const double total = q.norm();
  if (total == 0.0) {
    model.zero_input = true;
    model.core = Tensor4({1, 1, 1, 1});
    for (int m = 0; m < 4; ++m) {
      model.factors[m] = Eigen::MatrixXd::Zero(q.dim(m), 1);
      model.factors[m](0, 0) = 1.0;
    }
    return model;
  }

  const double budget2 = std::pow(eps * total / 2.0, 2);  // per-mode tail
  Tensor4 cur = q;
  for (int mode = 1; mode <= 4; ++mode) {
    const Eigen::MatrixXd a = unfold(cur, mode);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();

    Eigen::Index rank = sigma.size();
    double tail = 0.0;
    while (rank > 1) {
      const double next = tail + sigma[rank - 1] * sigma[rank - 1];
      if (next > budget2) break;
      tail = next;
      --rank;
    }
    model.factors[mode - 1] = svd.matrixU().leftCols(rank);

    Tensor4::Dims dims = cur.dims();
    dims[mode - 1] = rank;
    cur = fold(model.factors[mode - 1].transpose() * a, mode, dims);
  }
  model.core = std::move(cur);
  return model;
}

Tensor4 reconstruct(const TuckerModel& m) {
  Tensor4 out = m.core;
  for (int mode = 1; mode <= 4; ++mode)
    out = mode_product(out, m.factors[mode - 1], mode);
  return out;
}

}  // namespace trom
