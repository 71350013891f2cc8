#include <doctest.h>

#include <cmath>
#include <random>

#include "trom/tensor.hpp"

using namespace trom;

namespace {

Tensor4 random_tensor(Tensor4::Dims dims, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Tensor4 t(dims);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

// Brute-force mode product, independent of the unfold/fold machinery.
Tensor4 mode_product_oracle(const Tensor4& t, const Eigen::MatrixXd& m,
                            int mode) {
  Tensor4::Dims out_dims = t.dims();
  out_dims[mode - 1] = m.rows();
  Tensor4 out(out_dims);
  for (Eigen::Index i1 = 0; i1 < out_dims[0]; ++i1)
    for (Eigen::Index i2 = 0; i2 < out_dims[1]; ++i2)
      for (Eigen::Index i3 = 0; i3 < out_dims[2]; ++i3)
        for (Eigen::Index i4 = 0; i4 < out_dims[3]; ++i4) {
          double acc = 0.0;
          for (Eigen::Index k = 0; k < t.dim(mode - 1); ++k) {
            Eigen::Index idx[4] = {i1, i2, i3, i4};
            const Eigen::Index row = idx[mode - 1];
            idx[mode - 1] = k;
            acc += m(row, k) * t(idx[0], idx[1], idx[2], idx[3]);
          }
          out(i1, i2, i3, i4) = acc;
        }
  return out;
}

}  // namespace

TEST_CASE("unfold layout: rows index the mode, columns run row-major") {
  Tensor4 t({2, 3, 2, 2});
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = double(i);
  const Eigen::MatrixXd u1 = unfold(t, 1);
  REQUIRE(u1.rows() == 2);
  REQUIRE(u1.cols() == 12);
  for (Eigen::Index i1 = 0; i1 < 2; ++i1)
    for (Eigen::Index i2 = 0; i2 < 3; ++i2)
      for (Eigen::Index i3 = 0; i3 < 2; ++i3)
        for (Eigen::Index i4 = 0; i4 < 2; ++i4)
          CHECK(u1(i1, (i2 * 2 + i3) * 2 + i4) == t(i1, i2, i3, i4));
  const Eigen::MatrixXd u3 = unfold(t, 3);
  REQUIRE(u3.rows() == 2);
  REQUIRE(u3.cols() == 12);
  for (Eigen::Index i1 = 0; i1 < 2; ++i1)
    for (Eigen::Index i2 = 0; i2 < 3; ++i2)
      for (Eigen::Index i3 = 0; i3 < 2; ++i3)
        for (Eigen::Index i4 = 0; i4 < 2; ++i4)
          CHECK(u3(i3, (i1 * 3 + i2) * 2 + i4) == t(i1, i2, i3, i4));
}

TEST_CASE("fold inverts unfold for every mode") {
  std::mt19937_64 rng(3);
  const Tensor4 t = random_tensor({3, 4, 5, 2}, rng);
  for (int mode = 1; mode <= 4; ++mode) {
    const Tensor4 back = fold(unfold(t, mode), mode, t.dims());
    CHECK((back.data() - t.data()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mode_product matches the brute-force contraction") {
  std::mt19937_64 rng(5);
  const Tensor4 t = random_tensor({3, 4, 2, 5}, rng);
  std::normal_distribution<double> dist;
  for (int mode = 1; mode <= 4; ++mode) {
    Eigen::MatrixXd m(2, t.dim(mode - 1));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    const Tensor4 got = mode_product(t, m, mode);
    const Tensor4 want = mode_product_oracle(t, m, mode);
    CHECK((got.data() - want.data()).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("contract_modes23 agrees with composed mode products") {
  std::mt19937_64 rng(8);
  const Tensor4 t = random_tensor({4, 3, 5, 6}, rng);
  std::normal_distribution<double> dist;
  Eigen::RowVectorXd w2(3), w3(5);
  for (int i = 0; i < 3; ++i) w2[i] = dist(rng);
  for (int i = 0; i < 5; ++i) w3[i] = dist(rng);
  const Eigen::MatrixXd got = contract_modes23(t, w2, w3);
  REQUIRE(got.rows() == 4);
  REQUIRE(got.cols() == 6);
  const Tensor4 via = mode_product(mode_product(t, w2, 2), w3, 3);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 6; ++j)
      CHECK(got(i, j) == doctest::Approx(via(i, 0, 0, j)).epsilon(1e-13));
}

TEST_CASE("thin_svd factorization and orthonormality") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a(12, 7);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng);
  const ThinSvd svd = thin_svd(a);
  const Eigen::MatrixXd rec =
      svd.U * svd.sigma.asDiagonal() * svd.V.transpose();
  CHECK((rec - a).norm() <= 1e-12 * a.norm());
  CHECK((svd.U.transpose() * svd.U -
         Eigen::MatrixXd::Identity(svd.U.cols(), svd.U.cols()))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  CHECK((svd.V.transpose() * svd.V -
         Eigen::MatrixXd::Identity(svd.V.cols(), svd.V.cols()))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  for (Eigen::Index k = 1; k < svd.sigma.size(); ++k)
    CHECK(svd.sigma[k] <= svd.sigma[k - 1]);
  CHECK(svd.sigma.minCoeff() >= 0.0);
}

TEST_CASE("hosvd_truncate respects the relative error bound") {
  std::mt19937_64 rng(21);
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    const Tensor4 t = random_tensor({6, 5, 4, 7}, rng);
    const TuckerModel m = hosvd_truncate(t, eps);
    const Tensor4 rec = reconstruct(m);
    const double err = (rec.data() - t.data()).norm();
    CHECK(err <= eps * t.norm() * (1.0 + 1e-12));
    for (const Eigen::MatrixXd& f : m.factors) {
      CHECK((f.transpose() * f -
             Eigen::MatrixXd::Identity(f.cols(), f.cols()))
                .cwiseAbs()
                .maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("hosvd_truncate is near-exact at tight tolerance") {
  std::mt19937_64 rng(34);
  const Tensor4 t = random_tensor({4, 4, 3, 5}, rng);
  const TuckerModel m = hosvd_truncate(t, 1e-12);
  const Tensor4 rec = reconstruct(m);
  CHECK((rec.data() - t.data()).norm() <= 1e-11 * t.norm());
  // Core energy matches the tensor energy when nothing is truncated.
  CHECK(m.core.norm() == doctest::Approx(t.norm()).epsilon(1e-12));
}

TEST_CASE("hosvd_truncate finds the exact rank of a separable tensor") {
  Eigen::VectorXd a(6), b(5), c(4), d(7);
  for (int i = 0; i < 6; ++i) a[i] = std::sin(i + 1.0);
  for (int i = 0; i < 5; ++i) b[i] = std::cos(0.5 * i) + 2.0;
  for (int i = 0; i < 4; ++i) c[i] = 1.0 / (i + 1.0);
  for (int i = 0; i < 7; ++i) d[i] = std::exp(-0.3 * i);
  Tensor4 t({6, 5, 4, 7});
  for (Eigen::Index i1 = 0; i1 < 6; ++i1)
    for (Eigen::Index i2 = 0; i2 < 5; ++i2)
      for (Eigen::Index i3 = 0; i3 < 4; ++i3)
        for (Eigen::Index i4 = 0; i4 < 7; ++i4)
          t(i1, i2, i3, i4) = a[i1] * b[i2] * c[i3] * d[i4];
  const TuckerModel m = hosvd_truncate(t, 1e-10);
  const auto ranks = m.ranks();
  CHECK(ranks[0] == 1);
  CHECK(ranks[1] == 1);
  CHECK(ranks[2] == 1);
  CHECK(ranks[3] == 1);
  CHECK((reconstruct(m).data() - t.data()).norm() <= 1e-10 * t.norm());
}

TEST_CASE("hosvd_truncate ranks shrink as the tolerance loosens") {
  std::mt19937_64 rng(55);
  // A smooth tensor with decaying spectrum, not white noise.
  Tensor4 t({8, 6, 6, 9});
  for (Eigen::Index i1 = 0; i1 < 8; ++i1)
    for (Eigen::Index i2 = 0; i2 < 6; ++i2)
      for (Eigen::Index i3 = 0; i3 < 6; ++i3)
        for (Eigen::Index i4 = 0; i4 < 9; ++i4)
          t(i1, i2, i3, i4) =
              std::exp(-0.1 * (i1 + i2 + i3 + i4)) +
              0.2 * std::sin(0.7 * i1 * i4 + 0.3 * i2) * std::cos(0.5 * i3);
  const auto tight = hosvd_truncate(t, 1e-8).ranks();
  const auto loose = hosvd_truncate(t, 0.3).ranks();
  for (int m = 0; m < 4; ++m) CHECK(loose[m] <= tight[m]);
  CHECK(loose[0] + loose[1] + loose[2] + loose[3] <
        tight[0] + tight[1] + tight[2] + tight[3]);
}

TEST_CASE("hosvd_truncate handles the zero tensor") {
  const Tensor4 z({3, 3, 3, 3});
  const TuckerModel m = hosvd_truncate(z, 1e-5);
  CHECK(m.zero_input);
  const auto ranks = m.ranks();
  CHECK(ranks[0] == 1);
  CHECK(ranks[3] == 1);
  CHECK(reconstruct(m).norm() == 0.0);
}
