#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <vector>

#include "trom/metrics.hpp"
#include "trom/rom.hpp"
#include "trom/store.hpp"

namespace trom {

/// Offline/online orchestration: snapshot generation over the parameter grid,
/// Tucker compression, basis construction and ROM evaluation at query points.

struct OnlineOptions {
  RomMethod method = RomMethod::NonInterp;
  double eps_loc = 4e-3;
  int p = 2;                 // Lagrange order for the interpolatory variant
  Eigen::Index dim_h = 0;    // > 0 fixes the basis dimensions
  Eigen::Index dim_q = 0;
};

SnapshotStore offline_generate(const std::filesystem::path& dir,
                               const ParameterGrid& grid, const RunConfig& cfg,
                               std::uint64_t seed, int workers = 1);

// HOSVD-compresses both snapshot tensors and persists the models.
void offline_compress(SnapshotStore& store, double eps_h, double eps_q);

// Create-or-resume: generates missing slices and compresses if needed.
SnapshotStore prepare_store(const std::filesystem::path& dir,
                            const ParameterGrid& grid, const RunConfig& cfg,
                            std::uint64_t seed, int workers, double eps_h,
                            double eps_q);

// Holds the loaded compression artifacts of one store for online queries.
class RomContext {
 public:
  explicit RomContext(SnapshotStore store) : store_(std::move(store)) {}

  const SnapshotStore& store() const { return store_; }

  // For RomMethod::Pod with dim_h == 0, the dimensions are copied from the
  // non-interpolatory tROM basis at the same eps_loc.
  LocalBasis make_basis(const ParameterPair& mu, const OnlineOptions& opts);

  // Reference FOM at mu, using the store's on-disk cache.
  Trajectory reference_fom(const ParameterPair& mu);

 private:
  const TuckerModel& model_h();
  const TuckerModel& model_q();
  const ThinSvd& pod_h();
  const ThinSvd& pod_q();
  static BasisFactor pod_prefix(const ThinSvd& svd, Eigen::Index rank);

  SnapshotStore store_;
  std::optional<TuckerModel> model_h_, model_q_;
  std::optional<ThinSvd> pod_h_, pod_q_;
  std::mutex mutex_;
};

struct OnlineResult {
  ErrorReport report;
  LocalBasis basis;
  RomTrajectory rom;
  Trajectory fom;
};

OnlineResult online_solve(RomContext& ctx, const ParameterPair& mu,
                          const OnlineOptions& opts);

// Evaluates the ROM over an ascending hR sweep at fixed hL; per-point
// numerical failures are skipped (recorded with a NaN error by the caller's
// CSV layer, not here).
std::vector<ErrorReport> sweep_hr(RomContext& ctx, double hL,
                                  const Eigen::VectorXd& hr_values,
                                  const OnlineOptions& opts);

std::vector<ErrorReport> sweep_points(RomContext& ctx,
                                      const std::vector<ParameterPair>& mus,
                                      const OnlineOptions& opts);

}  // namespace trom
