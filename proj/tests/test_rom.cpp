#include <doctest.h>

#include <random>

#include "trom/metrics.hpp"
#include "trom/rom.hpp"
#include "trom/tensor.hpp"

using namespace trom;

namespace {

LocalBasis identity_basis(int nx) {
  LocalBasis b;
  b.Vh = Eigen::MatrixXd::Identity(nx, nx);
  b.Vq = Eigen::MatrixXd::Identity(nx, nx);
  return b;
}

Eigen::MatrixXd random_orthonormal(int nx, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a(nx, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng);
  return thin_svd(a).U;
}

}  // namespace

TEST_CASE("project_ic / reconstruct_state is the orthogonal projection") {
  std::mt19937_64 rng(41);
  const int nx = 60;
  LocalBasis basis;
  basis.Vh = random_orthonormal(nx, 8, rng);
  basis.Vq = random_orthonormal(nx, 5, rng);

  std::normal_distribution<double> dist;
  FieldState s;
  s.h.resize(nx);
  s.q.resize(nx);
  for (int i = 0; i < nx; ++i) {
    s.h[i] = dist(rng) + 5.0;
    s.q[i] = dist(rng);
  }
  const Coefficients alpha = project_ic(s, basis);
  const FieldState rec = reconstruct_state(alpha, basis);
  const Eigen::VectorXd ph = basis.Vh * (basis.Vh.transpose() * s.h);
  const Eigen::VectorXd pq = basis.Vq * (basis.Vq.transpose() * s.q);
  CHECK((rec.h - ph).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((rec.q - pq).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("project_ic rejects mismatched dimensions") {
  LocalBasis basis = identity_basis(10);
  FieldState s;
  s.h = Eigen::VectorXd::Ones(12);
  s.q = Eigen::VectorXd::Zero(12);
  CHECK_THROWS_AS(project_ic(s, basis), ValidationError);
}

TEST_CASE("identity-basis ROM reproduces the FOM on a wet dam break") {
  RunConfig cfg;
  cfg.Nx = 100;
  cfg.T = 0.5;
  cfg.snapshot_count = 21;
  const ParameterPair mu{20.0, 4.0};

  const Trajectory fom = run_fom(mu, cfg);
  const LocalBasis basis = identity_basis(cfg.Nx);
  const RomTrajectory rom = run_rom(mu, basis, cfg);

  REQUIRE(rom.times.size() == fom.times.size());
  const Eigen::MatrixXd rh = rom_field_h(rom, basis);
  const Eigen::MatrixXd rq = rom_field_q(rom, basis);
  const Eigen::MatrixXd fh = trajectory_field_h(fom);
  const Eigen::MatrixXd fq = trajectory_field_q(fom);
  CHECK((rh - fh).norm() <= 1e-9 * fh.norm());
  CHECK((rq - fq).norm() <= 1e-9 * fq.norm());
  for (std::size_t j = 0; j < fom.times.size(); ++j)
    CHECK(rom.times[j] == doctest::Approx(fom.times[j]).epsilon(1e-14));
}

TEST_CASE("trajectory-POD ROM stays close to its own FOM") {
  RunConfig cfg;
  cfg.Nx = 100;
  cfg.T = 0.7;
  cfg.snapshot_count = 51;
  const ParameterPair mu{20.0, 4.0};
  const Trajectory fom = run_fom(mu, cfg);
  const Eigen::MatrixXd fh = trajectory_field_h(fom);
  const Eigen::MatrixXd fq = trajectory_field_q(fom);

  LocalBasis basis;
  basis.Vh = pod_global_basis(fh, 40, 0.0).V;
  basis.Vq = pod_global_basis(fq, 40, 0.0).V;
  basis.mu_star = mu;
  basis.method = RomMethod::Pod;

  const RomTrajectory rom = run_rom(mu, basis, cfg);
  const double dx = cfg.Lx / cfg.Nx;
  const double eh = rel_error_l2l2(rom_field_h(rom, basis), fh, fom.times, dx);
  const double eq = rel_error_l2l2(rom_field_q(rom, basis), fq, fom.times, dx);
  CHECK(eh <= 0.05);
  CHECK(eq <= 0.1);
}

TEST_CASE("rom_step reports divergence for an unstable time step") {
  RunConfig cfg;
  cfg.Nx = 50;
  const SpatialGrid grid = SpatialGrid::make(cfg);
  const LocalBasis basis = identity_basis(cfg.Nx);
  const FieldState ic = dam_break_ic(grid, {20.0, 1.0}, cfg.x_dam);
  Coefficients alpha = project_ic(ic, basis);
  auto run_until_blowup = [&] {
    for (int step = 0; step < 50; ++step)
      alpha = rom_step(alpha, basis, grid, 10.0, cfg.g);
  };
  CHECK_THROWS_AS(run_until_blowup(), NumericalError);
}

TEST_CASE("run_rom coefficient matrices have the schedule's shape") {
  RunConfig cfg;
  cfg.Nx = 80;
  cfg.T = 0.3;
  cfg.snapshot_count = 21;
  const ParameterPair mu{18.0, 2.0};
  const Trajectory fom = run_fom(mu, cfg);
  LocalBasis basis;
  basis.Vh = pod_global_basis(trajectory_field_h(fom), 12, 0.0).V;
  basis.Vq = pod_global_basis(trajectory_field_q(fom), 9, 0.0).V;
  REQUIRE(basis.rank_h() == 12);
  REQUIRE(basis.rank_q() == 9);
  const RomTrajectory rom = run_rom(mu, basis, cfg);
  CHECK(rom.alpha_h.rows() == 21);
  CHECK(rom.alpha_h.cols() == 12);
  CHECK(rom.alpha_q.cols() == 9);
  CHECK(rom_field_h(rom, basis).rows() == cfg.Nx);
  CHECK(rom_field_h(rom, basis).cols() == 21);
}
