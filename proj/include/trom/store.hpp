#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "trom/fom.hpp"
#include "trom/sampling.hpp"
#include "trom/tensor.hpp"

namespace trom {

/// On-disk snapshot store: a manifest plus raw little-endian float64 arrays,
/// each with a short header (magic "TROM", version u32, ndim u32, dims u64[]).

inline constexpr std::uint32_t kStoreLayoutVersion = 1;

void save_tensor(const std::filesystem::path& path, const Tensor4& t);
Tensor4 load_tensor(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

// FNV-1a 64-bit hash of a file's bytes, hex-encoded; used for CSV provenance.
std::string file_hash(const std::filesystem::path& path);

struct TuckerMeta {
  double eps_h = 0.0;
  double eps_q = 0.0;
  std::array<Eigen::Index, 4> ranks_h{};
  std::array<Eigen::Index, 4> ranks_q{};
  double measured_err_h = 0.0;
  double measured_err_q = 0.0;
};

class SnapshotStore {
 public:
  static SnapshotStore create(const std::filesystem::path& dir,
                              const ParameterGrid& grid, const RunConfig& cfg,
                              std::uint64_t seed);
  static SnapshotStore open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const ParameterGrid& grid() const { return grid_; }
  const RunConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  bool slice_done(int i, int j) const { return completed_.count({i, j}) > 0; }
  bool all_slices_done() const;

  // Writes the (hL_i, hR_j) snapshot slice (Nx x N_T per variable) into the
  // full-size tensor files and records completion in the manifest.
  void write_slice(int i, int j, const Eigen::MatrixXd& h_slice,
                   const Eigen::MatrixXd& q_slice);

  Tensor4 load_qh() const;
  Tensor4 load_qq() const;

  bool has_tucker() const { return tucker_.has_value(); }
  const TuckerMeta& tucker_meta() const;
  void save_tucker(const TuckerModel& model_h, const TuckerModel& model_q,
                   double measured_err_h, double measured_err_q);
  TuckerModel load_tucker_h() const;
  TuckerModel load_tucker_q() const;

  // FOM trajectory cache keyed by (mu, config).
  std::optional<Trajectory> load_cached_fom(const ParameterPair& mu) const;
  void cache_fom(const ParameterPair& mu, const Trajectory& traj) const;

  std::string manifest_hash() const;

 private:
  SnapshotStore() = default;
  void save_manifest() const;
  std::filesystem::path tensor_path(char var) const;

  std::filesystem::path dir_;
  ParameterGrid grid_;
  RunConfig cfg_;
  std::uint64_t seed_ = 0;
  std::set<std::pair<int, int>> completed_;
  std::optional<TuckerMeta> tucker_;
};

}  // namespace trom
