#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "trom/store.hpp"

using namespace trom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Tensor4 random_tensor(Tensor4::Dims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Tensor4 t(dims);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

}  // namespace

TEST_CASE("tensor round trip is bit exact") {
  TempDir tmp("trom_store_tensor");
  const Tensor4 t = random_tensor({3, 4, 5, 6}, 101);
  save_tensor(tmp.path / "t.bin", t);
  const Tensor4 back = load_tensor(tmp.path / "t.bin");
  CHECK(back.dims() == t.dims());
  CHECK(std::memcmp(back.data().data(), t.data().data(),
                    sizeof(double) * t.size()) == 0);
}

TEST_CASE("matrix round trip is bit exact") {
  TempDir tmp("trom_store_matrix");
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(7, 9);
  save_matrix(tmp.path / "m.bin", m);
  const Eigen::MatrixXd back = load_matrix(tmp.path / "m.bin");
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 9);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("array files carry the documented binary header") {
  TempDir tmp("trom_store_header");
  Eigen::MatrixXd m(2, 3);
  m << 1.5, 2.5, 3.5, 4.5, 5.5, 6.5;
  save_matrix(tmp.path / "m.bin", m);

  std::ifstream in(tmp.path / "m.bin", std::ios::binary);
  char magic[4];
  std::uint32_t version = 0, ndim = 0;
  std::uint64_t d0 = 0, d1 = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&ndim), 4);
  in.read(reinterpret_cast<char*>(&d0), 8);
  in.read(reinterpret_cast<char*>(&d1), 8);
  CHECK(std::memcmp(magic, "TROM", 4) == 0);
  CHECK(version == kStoreLayoutVersion);
  CHECK(ndim == 2);
  CHECK(d0 == 2);
  CHECK(d1 == 3);
  // Payload is row-major float64: first value is m(0, 0), fourth is m(1, 0).
  double vals[6];
  in.read(reinterpret_cast<char*>(vals), sizeof(vals));
  REQUIRE(bool(in));
  CHECK(vals[0] == 1.5);
  CHECK(vals[1] == 2.5);
  CHECK(vals[3] == 4.5);
}

TEST_CASE("file_hash matches the FNV-1a reference values") {
  TempDir tmp("trom_store_hash");
  {
    std::ofstream out(tmp.path / "empty.bin", std::ios::binary);
  }
  CHECK(file_hash(tmp.path / "empty.bin") == "cbf29ce484222325");
  {
    std::ofstream out(tmp.path / "a.bin", std::ios::binary);
    out << "a";
  }
  CHECK(file_hash(tmp.path / "a.bin") == "af63dc4c8601ec8c");
}

TEST_CASE("snapshot store create, write slices, reopen, load") {
  TempDir tmp("trom_store_full");
  RunConfig cfg;
  cfg.Nx = 10;
  cfg.snapshot_count = 4;
  const ParameterGrid grid =
      ParameterGrid::make(ParameterBox{}, 3, 2, NodeKind::Chebyshev);

  SnapshotStore store = SnapshotStore::create(tmp.path / "store", grid, cfg,
                                              2024);
  CHECK_FALSE(store.all_slices_done());

  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  std::vector<Eigen::MatrixXd> h_slices, q_slices;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      Eigen::MatrixXd h(cfg.Nx, cfg.snapshot_count), q(h.rows(), h.cols());
      for (Eigen::Index k = 0; k < h.size(); ++k) {
        h.data()[k] = dist(rng);
        q.data()[k] = dist(rng);
      }
      h_slices.push_back(h);
      q_slices.push_back(q);
      CHECK_FALSE(store.slice_done(i, j));
      store.write_slice(i, j, h, q);
      CHECK(store.slice_done(i, j));
    }
  CHECK(store.all_slices_done());

  // Reopen from disk and verify manifest state and tensor contents.
  SnapshotStore reopened = SnapshotStore::open(tmp.path / "store");
  CHECK(reopened.seed() == 2024);
  CHECK(reopened.config().Nx == cfg.Nx);
  CHECK(reopened.grid().hL_nodes.size() == 3);
  CHECK(reopened.all_slices_done());
  CHECK_FALSE(reopened.has_tucker());

  const Tensor4 qh = reopened.load_qh();
  const Tensor4 qq = reopened.load_qq();
  REQUIRE(qh.dims() == Tensor4::Dims{10, 3, 2, 4});
  int slice = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j, ++slice)
      for (int ix = 0; ix < cfg.Nx; ++ix)
        for (int k = 0; k < cfg.snapshot_count; ++k) {
          CHECK(qh(ix, i, j, k) == h_slices[slice](ix, k));
          CHECK(qq(ix, i, j, k) == q_slices[slice](ix, k));
        }

  CHECK_THROWS_AS(reopened.tucker_meta(), IoError);
  CHECK_THROWS_AS(
      reopened.write_slice(5, 0, h_slices[0], q_slices[0]), ValidationError);
}

TEST_CASE("tucker model round trip through the store") {
  TempDir tmp("trom_store_tucker");
  RunConfig cfg;
  cfg.Nx = 8;
  cfg.snapshot_count = 5;
  const ParameterGrid grid =
      ParameterGrid::make(ParameterBox{}, 2, 3, NodeKind::Uniform);
  SnapshotStore store = SnapshotStore::create(tmp.path / "store", grid, cfg,
                                              1);

  const Tensor4 th = random_tensor({8, 2, 3, 5}, 9);
  const Tensor4 tq = random_tensor({8, 2, 3, 5}, 10);
  const TuckerModel mh = hosvd_truncate(th, 1e-3);
  const TuckerModel mq = hosvd_truncate(tq, 1e-4);
  store.save_tucker(mh, mq, 5e-4, 6e-5);

  SnapshotStore reopened = SnapshotStore::open(tmp.path / "store");
  REQUIRE(reopened.has_tucker());
  CHECK(reopened.tucker_meta().eps_h == 1e-3);
  CHECK(reopened.tucker_meta().measured_err_q == 6e-5);
  CHECK(reopened.tucker_meta().ranks_h == mh.ranks());

  const TuckerModel bh = reopened.load_tucker_h();
  CHECK(bh.core.dims() == mh.core.dims());
  CHECK((bh.core.data() - mh.core.data()).cwiseAbs().maxCoeff() == 0.0);
  for (int m = 0; m < 4; ++m)
    CHECK((bh.factors[m] - mh.factors[m]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(bh.eps == 1e-3);
}

TEST_CASE("fom trajectory cache round trip") {
  TempDir tmp("trom_store_cache");
  RunConfig cfg;
  cfg.Nx = 20;
  cfg.T = 0.2;
  cfg.snapshot_count = 3;
  const ParameterGrid grid =
      ParameterGrid::make(ParameterBox{}, 2, 2, NodeKind::Uniform);
  SnapshotStore store = SnapshotStore::create(tmp.path / "store", grid, cfg,
                                              7);

  const ParameterPair mu{15.0, 2.0};
  CHECK_FALSE(store.load_cached_fom(mu).has_value());
  const Trajectory traj = run_fom(mu, cfg);
  store.cache_fom(mu, traj);
  const auto back = store.load_cached_fom(mu);
  REQUIRE(back.has_value());
  REQUIRE(back->times.size() == traj.times.size());
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    CHECK(back->times[j] == traj.times[j]);
    CHECK((back->states[j].h - traj.states[j].h).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back->states[j].q - traj.states[j].q).cwiseAbs().maxCoeff() == 0.0);
  }
  // A different parameter misses the cache.
  CHECK_FALSE(store.load_cached_fom({15.0, 2.5}).has_value());
}

TEST_CASE("manifest hash changes when the store state changes") {
  TempDir tmp("trom_store_manifest");
  RunConfig cfg;
  cfg.Nx = 6;
  cfg.snapshot_count = 2;
  const ParameterGrid grid =
      ParameterGrid::make(ParameterBox{}, 2, 2, NodeKind::Uniform);
  SnapshotStore store = SnapshotStore::create(tmp.path / "store", grid, cfg,
                                              3);
  const std::string before = store.manifest_hash();
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(6, 2);
  store.write_slice(0, 0, z, z);
  CHECK(store.manifest_hash() != before);
}
