#include "trom/pipeline.hpp"

#include <atomic>
#include <thread>

namespace trom {

namespace fs = std::filesystem;

SnapshotStore offline_generate(const fs::path& dir, const ParameterGrid& grid,
                               const RunConfig& cfg, std::uint64_t seed,
                               int workers) {
  SnapshotStore store = fs::exists(dir / "manifest.json")
                            ? SnapshotStore::open(dir)
                            : SnapshotStore::create(dir, grid, cfg, seed);

  const int nl = static_cast<int>(store.grid().hL_nodes.size());
  const int nr = static_cast<int>(store.grid().hR_nodes.size());
  std::vector<std::pair<int, int>> pending;
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nr; ++j)
      if (!store.slice_done(i, j)) pending.emplace_back(i, j);
  if (pending.empty()) return store;

  std::mutex write_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size() || failed.load()) return;
      const auto [i, j] = pending[k];
      const ParameterPair mu{store.grid().hL_nodes[i],
                             store.grid().hR_nodes[j]};
      try {
        const Trajectory traj = run_fom(mu, store.config());
        const Eigen::MatrixXd h = trajectory_field_h(traj);
        const Eigen::MatrixXd q = trajectory_field_q(traj);
        std::lock_guard<std::mutex> lock(write_mutex);
        store.write_slice(i, j, h, q);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(write_mutex);
        failed = true;
        failure = "offline_generate: grid pair (" + std::to_string(i) + "," +
                  std::to_string(j) + ") failed: " + e.what();
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(workers, static_cast<int>(pending.size())));
  std::vector<std::thread> threads;
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failed) throw NumericalError(failure);
  return store;
}

void offline_compress(SnapshotStore& store, double eps_h, double eps_q) {
  if (!store.all_slices_done())
    throw ValidationError("offline_compress: store has missing slices");
  const Tensor4 qh = store.load_qh();
  const Tensor4 qq = store.load_qq();
  const TuckerModel mh = hosvd_truncate(qh, eps_h);
  const TuckerModel mq = hosvd_truncate(qq, eps_q);
  const double err_h =
      (reconstruct(mh).data() - qh.data()).norm() / qh.norm();
  const double err_q =
      (reconstruct(mq).data() - qq.data()).norm() / qq.norm();
  if (err_h > eps_h || err_q > eps_q)
    throw NumericalError("offline_compress: tolerance not met (err_h=" +
                         std::to_string(err_h) + ", err_q=" +
                         std::to_string(err_q) + ")");
  store.save_tucker(mh, mq, err_h, err_q);
}

SnapshotStore prepare_store(const fs::path& dir, const ParameterGrid& grid,
                            const RunConfig& cfg, std::uint64_t seed,
                            int workers, double eps_h, double eps_q) {
  SnapshotStore store = offline_generate(dir, grid, cfg, seed, workers);
  if (!store.has_tucker()) offline_compress(store, eps_h, eps_q);
  return store;
}

const TuckerModel& RomContext::model_h() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!model_h_) model_h_ = store_.load_tucker_h();
  return *model_h_;
}

const TuckerModel& RomContext::model_q() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!model_q_) model_q_ = store_.load_tucker_q();
  return *model_q_;
}

const ThinSvd& RomContext::pod_h() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!pod_h_) pod_h_ = thin_svd(unfold(store_.load_qh(), 1));
  return *pod_h_;
}

const ThinSvd& RomContext::pod_q() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!pod_q_) pod_q_ = thin_svd(unfold(store_.load_qq(), 1));
  return *pod_q_;
}

BasisFactor RomContext::pod_prefix(const ThinSvd& svd, Eigen::Index rank) {
  Eigen::Index eff = svd.sigma.size();
  while (eff > 1 && svd.sigma[eff - 1] < 1e-14 * svd.sigma[0]) --eff;
  BasisFactor out;
  out.V = svd.U.leftCols(std::min(rank, eff));
  out.sigma = svd.sigma;
  return out;
}

LocalBasis RomContext::make_basis(const ParameterPair& mu,
                                  const OnlineOptions& opts) {
  mu.validate();
  const ParameterBox& box = store_.grid().box;
  if (mu.hL < box.hL_min || mu.hL > box.hL_max || mu.hR < box.hR_min ||
      mu.hR > box.hR_max)
    throw ValidationError("make_basis: mu outside the training box [" +
                          std::to_string(box.hL_min) + "," +
                          std::to_string(box.hL_max) + "]x[" +
                          std::to_string(box.hR_min) + "," +
                          std::to_string(box.hR_max) + "]");

  LocalBasis basis;
  basis.mu_star = mu;
  basis.method = opts.method;

  auto truncate = [](const BasisFactor& f, Eigen::Index dim) {
    return dim > 0 && dim < f.V.cols()
               ? Eigen::MatrixXd(f.V.leftCols(dim))
               : f.V;
  };
  // With a fixed dimension the energy threshold must not pre-truncate the
  // local SVD below the request, so the basis is built untruncated first.
  const double eps_h = opts.dim_h > 0 ? 0.0 : opts.eps_loc;
  const double eps_q = opts.dim_q > 0 ? 0.0 : opts.eps_loc;

  switch (opts.method) {
    case RomMethod::Interp: {
      basis.Vh = truncate(
          interp_local_basis(model_h(), store_.grid(), mu, opts.p, eps_h),
          opts.dim_h);
      basis.Vq = truncate(
          interp_local_basis(model_q(), store_.grid(), mu, opts.p, eps_q),
          opts.dim_q);
      break;
    }
    case RomMethod::NonInterp: {
      basis.Vh = truncate(
          noninterp_local_basis(model_h(), store_.grid(), mu, eps_h),
          opts.dim_h);
      basis.Vq = truncate(
          noninterp_local_basis(model_q(), store_.grid(), mu, eps_q),
          opts.dim_q);
      break;
    }
    case RomMethod::Pod: {
      Eigen::Index dh = opts.dim_h;
      Eigen::Index dq = opts.dim_q;
      if (dh <= 0 || dq <= 0) {
        // Same-dimension comparison: copy the adaptive tROM dimensions.
        OnlineOptions trom_opts = opts;
        trom_opts.method = RomMethod::NonInterp;
        trom_opts.dim_h = trom_opts.dim_q = 0;
        const LocalBasis ref = make_basis(mu, trom_opts);
        dh = ref.rank_h();
        dq = ref.rank_q();
      }
      basis.Vh = pod_prefix(pod_h(), dh).V;
      basis.Vq = pod_prefix(pod_q(), dq).V;
      break;
    }
  }
  return basis;
}

Trajectory RomContext::reference_fom(const ParameterPair& mu) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto cached = store_.load_cached_fom(mu)) return *cached;
  }
  const Trajectory traj = run_fom(mu, store_.config());
  std::lock_guard<std::mutex> lock(mutex_);
  store_.cache_fom(mu, traj);
  return traj;
}

OnlineResult online_solve(RomContext& ctx, const ParameterPair& mu,
                          const OnlineOptions& opts) {
  OnlineResult out;
  out.basis = ctx.make_basis(mu, opts);
  out.rom = run_rom(mu, out.basis, ctx.store().config());
  out.fom = ctx.reference_fom(mu);

  const double dx = ctx.store().config().Lx / ctx.store().config().Nx;
  const Eigen::MatrixXd fom_h = trajectory_field_h(out.fom);
  const Eigen::MatrixXd fom_q = trajectory_field_q(out.fom);
  const Eigen::MatrixXd rom_h = rom_field_h(out.rom, out.basis);
  const Eigen::MatrixXd rom_q = rom_field_q(out.rom, out.basis);

  out.report.mu = mu;
  out.report.method = opts.method;
  out.report.rank_h = out.basis.rank_h();
  out.report.rank_q = out.basis.rank_q();
  out.report.e_l2l2 = rel_error_l2l2(rom_h, fom_h, out.fom.times, dx);
  out.report.e_l2h1 = rel_error_l2h1(rom_h, fom_h, out.fom.times, dx);
  out.report.e_l2l2_q = rel_error_l2l2(rom_q, fom_q, out.fom.times, dx);
  out.report.e_l2h1_q = rel_error_l2h1(rom_q, fom_q, out.fom.times, dx);
  return out;
}

std::vector<ErrorReport> sweep_hr(RomContext& ctx, double hL,
                                  const Eigen::VectorXd& hr_values,
                                  const OnlineOptions& opts) {
  std::vector<ParameterPair> mus;
  mus.reserve(hr_values.size());
  for (Eigen::Index k = 0; k < hr_values.size(); ++k)
    mus.push_back({hL, hr_values[k]});
  return sweep_points(ctx, mus, opts);
}

std::vector<ErrorReport> sweep_points(RomContext& ctx,
                                      const std::vector<ParameterPair>& mus,
                                      const OnlineOptions& opts) {
  std::vector<ErrorReport> out;
  out.reserve(mus.size());
  for (const ParameterPair& mu : mus) {
    try {
      out.push_back(online_solve(ctx, mu, opts).report);
    } catch (const NumericalError& e) {
      ErrorReport rep;
      rep.mu = mu;
      rep.method = opts.method;
      rep.failed = true;
      rep.failure = e.what();
      out.push_back(rep);
    }
  }
  return out;
}

}  // namespace trom
