#pragma once

#include <Eigen/Dense>
#include <array>

#include "trom/errors.hpp"

namespace trom {

/// Dense order-4 tensor algebra: unfoldings, mode products, thin SVD and the
/// sequentially truncated HOSVD behind the Tucker compression.

// Dense order-4 tensor of doubles, row-major over (n1, n2, n3, n4):
// flat index = ((i1*n2 + i2)*n3 + i3)*n4 + i4.
class Tensor4 {
 public:
  using Dims = std::array<Eigen::Index, 4>;

  Tensor4() : dims_{0, 0, 0, 0} {}
  explicit Tensor4(Dims dims)
      : dims_(dims),
        data_(Eigen::VectorXd::Zero(dims[0] * dims[1] * dims[2] * dims[3])) {}

  const Dims& dims() const { return dims_; }
  Eigen::Index dim(int m) const { return dims_[m]; }
  Eigen::Index size() const { return data_.size(); }

  double& operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3,
                     Eigen::Index i4) {
    return data_[flat(i1, i2, i3, i4)];
  }
  double operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3,
                    Eigen::Index i4) const {
    return data_[flat(i1, i2, i3, i4)];
  }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  double norm() const { return data_.norm(); }
  bool allFinite() const { return data_.allFinite(); }

 private:
  Eigen::Index flat(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3,
                    Eigen::Index i4) const {
    return ((i1 * dims_[1] + i2) * dims_[2] + i3) * dims_[3] + i4;
  }

  Dims dims_;
  Eigen::VectorXd data_;
};

// Mode-m matricization, m in 1..4: rows = dims[m-1], columns run row-major
// over the remaining dimensions in increasing order.
Eigen::MatrixXd unfold(const Tensor4& t, int mode);

// Exact inverse of unfold for the given target dims.
Tensor4 fold(const Eigen::MatrixXd& m, int mode, Tensor4::Dims dims);

// fold(M * unfold(t, mode), mode); a 1xN matrix contracts the mode to size 1.
Tensor4 mode_product(const Tensor4& t, const Eigen::MatrixXd& m, int mode);

// Contract modes 2 and 3 with row vectors, yielding the (dim1 x dim4) slice.
Eigen::MatrixXd contract_modes23(const Tensor4& t, const Eigen::RowVectorXd& w2,
                                 const Eigen::RowVectorXd& w3);

struct ThinSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;  // non-increasing, non-negative
  Eigen::MatrixXd V;
};
ThinSvd thin_svd(const Eigen::MatrixXd& a);

struct TuckerModel {
  Tensor4 core;
  std::array<Eigen::MatrixXd, 4> factors;  // orthonormal columns
  double eps = 0.0;                        // tolerance used
  bool zero_input = false;

  std::array<Eigen::Index, 4> ranks() const {
    return {factors[0].cols(), factors[1].cols(), factors[2].cols(),
            factors[3].cols()};
  }
};

// Sequentially truncated HOSVD with a per-mode root-sum-square error budget of
// eps*||q||_F / 2, guaranteeing ||q - reconstruct||_F <= eps*||q||_F.
TuckerModel hosvd_truncate(const Tensor4& q, double eps);

Tensor4 reconstruct(const TuckerModel& m);

}  // namespace trom
