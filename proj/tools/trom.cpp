#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "trom/pipeline.hpp"
#include "trom/riemann.hpp"

namespace fs = std::filesystem;
using namespace trom;

namespace {

struct GridSpec {
  int n_hl = 13;
  int n_hr = 17;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  if (std::sscanf(s.c_str(), "%dx%d", &g.n_hl, &g.n_hr) != 2)
    throw ValidationError("--grid expects NLxNR, got " + s);
  return g;
}

std::ofstream open_csv(const fs::path& path, const std::string& manifest_hash,
                       const std::string& columns) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# manifest_hash=" << manifest_hash << "\n" << columns << "\n";
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

void write_report_row(std::ostream& out, const ErrorReport& r) {
  out << r.mu.hL << "," << r.mu.hR << "," << to_string(r.method) << ","
      << r.rank_h << "," << r.rank_q << ",";
  if (r.failed)
    out << "nan,nan,nan,nan,failed\n";
  else
    out << fmt(r.e_l2l2) << "," << fmt(r.e_l2h1) << "," << fmt(r.e_l2l2_q)
        << "," << fmt(r.e_l2h1_q) << ",ok\n";
}

constexpr const char* kReportColumns =
    "hL,hR,method,rank_h,rank_q,e_l2l2_h,e_l2h1_h,e_l2l2_q,e_l2h1_q,status";

void write_aggregate_row(std::ostream& out, const std::string& label,
                         const AggregateReport& a) {
  out << label << "," << fmt(a.sup_l2l2) << "," << fmt(a.avg_l2l2) << ","
      << fmt(a.sup_l2h1) << "," << fmt(a.avg_l2h1) << "," << a.mean_rank_h
      << "," << a.mean_rank_q << "," << a.max_rank_h << "," << a.max_rank_q
      << "," << a.rule << "," << a.sample_count << "\n";
}

constexpr const char* kAggregateColumns =
    "config,sup_l2l2,avg_l2l2,sup_l2h1,avg_l2h1,mean_rank_h,mean_rank_q,"
    "max_rank_h,max_rank_q,rule,samples";

// Shared defaults across subcommands.
struct CommonOpts {
  std::string store = "store";
  std::string out = "out";
  GridSpec grid;
  std::string hr_kind = "chebyshev";
  RunConfig cfg;
  double eps_h = 1e-5;
  double eps_q = 1e-5;
  std::uint64_t seed = 2024;
  int workers = 1;
};

ParameterGrid make_grid(const CommonOpts& o) {
  return ParameterGrid::make(ParameterBox{}, o.grid.n_hl, o.grid.n_hr,
                             node_kind_from_string(o.hr_kind));
}

fs::path preset_store_dir(const fs::path& base, int nl, int nr,
                          NodeKind kind) {
  return base / (std::to_string(nl) + "x" + std::to_string(nr) + "_" +
                 to_string(kind));
}

RomContext preset_context(const CommonOpts& o, int nl, int nr, NodeKind kind) {
  const ParameterGrid grid = ParameterGrid::make(ParameterBox{}, nl, nr, kind);
  return RomContext(prepare_store(preset_store_dir(o.store, nl, nr, kind),
                                  grid, o.cfg, o.seed, o.workers, o.eps_h,
                                  o.eps_q));
}

void cmd_online_solve(const CommonOpts& o, double hl, double hr,
                      const std::string& method, double eps_loc, int p,
                      const std::string& dims) {
  RomContext ctx(SnapshotStore::open(o.store));
  OnlineOptions opts;
  opts.method = rom_method_from_string(method);
  opts.eps_loc = eps_loc;
  opts.p = p;
  if (!dims.empty()) {
    long lh = 0, lq = 0;
    if (std::sscanf(dims.c_str(), "%ld,%ld", &lh, &lq) != 2)
      throw ValidationError("--dims expects LH,LQ, got " + dims);
    opts.dim_h = lh;
    opts.dim_q = lq;
  }
  const ParameterPair mu{hl, hr};
  const OnlineResult res = online_solve(ctx, mu, opts);

  const std::string hash = ctx.store().manifest_hash();
  const RunConfig& cfg = ctx.store().config();
  const SpatialGrid sgrid = SpatialGrid::make(cfg);
  const Eigen::MatrixXd fom_h = trajectory_field_h(res.fom);
  const Eigen::MatrixXd rom_h = rom_field_h(res.rom, res.basis);

  auto profiles = open_csv(fs::path(o.out) / "profiles.csv", hash,
                           "x,h_fom,h_rom");
  const Eigen::Index last = fom_h.cols() - 1;
  for (Eigen::Index i = 0; i < fom_h.rows(); ++i)
    profiles << sgrid.centers[i] << "," << fmt(fom_h(i, last)) << ","
             << fmt(rom_h(i, last)) << "\n";

  auto errs = open_csv(fs::path(o.out) / "error_time.csv", hash,
                       "t,rel_l2_h,rel_l2_q");
  const Eigen::MatrixXd fom_q = trajectory_field_q(res.fom);
  const Eigen::MatrixXd rom_q = rom_field_q(res.rom, res.basis);
  for (Eigen::Index j = 0; j < fom_h.cols(); ++j) {
    const double eh = (rom_h.col(j) - fom_h.col(j)).norm() /
                      std::max(fom_h.col(j).norm(), 1e-300);
    const double eq_den = fom_q.col(j).norm();
    const double eq = eq_den > 0.0
                          ? (rom_q.col(j) - fom_q.col(j)).norm() / eq_den
                          : (rom_q.col(j) - fom_q.col(j)).norm();
    errs << res.fom.times[static_cast<std::size_t>(j)] << "," << fmt(eh) << ","
         << fmt(eq) << "\n";
  }

  auto report = open_csv(fs::path(o.out) / "report.csv", hash, kReportColumns);
  write_report_row(report, res.report);
  std::cout << "e_l2l2_h=" << fmt(res.report.e_l2l2)
            << " e_l2h1_h=" << fmt(res.report.e_l2h1)
            << " rank_h=" << res.report.rank_h
            << " rank_q=" << res.report.rank_q << "\n";
}

void preset_table2(const CommonOpts& o, int points_unused) {
  (void)points_unused;
  RomContext ctx = preset_context(o, 13, 17, NodeKind::Chebyshev);
  const std::string hash = ctx.store().manifest_hash();
  auto out = open_csv(fs::path(o.out) / "table2.csv", hash, kReportColumns);
  const std::vector<double> hr_values{0, 0.02, 0.07, 0.5, 1, 2, 3, 5, 7};
  for (double hr : hr_values) {
    OnlineOptions adaptive;
    adaptive.method = RomMethod::NonInterp;
    adaptive.eps_loc = 4e-3;
    write_report_row(out, online_solve(ctx, {25.0, hr}, adaptive).report);
    OnlineOptions fixed = adaptive;
    fixed.dim_h = 30;
    fixed.dim_q = 50;
    write_report_row(out, online_solve(ctx, {25.0, hr}, fixed).report);
  }
}

void preset_table4(const CommonOpts& o, int points) {
  auto out = open_csv(fs::path(o.out) / "table4.csv", "multi",
                      kAggregateColumns);
  const Eigen::VectorXd hr = uniform_nodes(0.0, 8.0, points);
  OnlineOptions opts;
  opts.method = RomMethod::NonInterp;
  opts.eps_loc = 4e-3;
  for (int nr : {5, 9, 17})
    for (NodeKind kind : {NodeKind::Chebyshev, NodeKind::Uniform}) {
      RomContext ctx = preset_context(o, 13, nr, kind);
      const auto reports = sweep_hr(ctx, 25.0, hr, opts);
      write_aggregate_row(out,
                          "NR=" + std::to_string(nr) + "_" + to_string(kind),
                          aggregate(reports, AggregateMode::OverHr));
    }
}

void preset_table5(const CommonOpts& o, int points) {
  auto out = open_csv(fs::path(o.out) / "table5.csv", "multi",
                      kAggregateColumns);
  const Eigen::VectorXd hr = uniform_nodes(0.0, 8.0, points);
  for (int nr : {5, 9, 17}) {
    RomContext ctx = preset_context(o, 13, nr, NodeKind::Chebyshev);
    for (RomMethod method : {RomMethod::Interp, RomMethod::NonInterp}) {
      OnlineOptions opts;
      opts.method = method;
      opts.eps_loc = 4e-3;
      const auto reports = sweep_hr(ctx, 25.0, hr, opts);
      write_aggregate_row(
          out, "NR=" + std::to_string(nr) + "_" + to_string(method),
          aggregate(reports, AggregateMode::OverHr));
    }
  }
}

void preset_table_pod(const CommonOpts& o, int mc_samples, bool fixed_dims,
                      const std::string& name) {
  auto out = open_csv(fs::path(o.out) / (name + ".csv"), "multi",
                      kAggregateColumns);
  const std::vector<std::pair<int, int>> grids{{4, 5}, {7, 9}, {13, 17},
                                               {20, 25}};
  for (const auto& [nl, nr] : grids) {
    RomContext ctx = preset_context(o, nl, nr, NodeKind::Chebyshev);
    const auto mus = monte_carlo_params(ctx.store().grid().box, mc_samples,
                                        o.seed);
    for (RomMethod method : {RomMethod::NonInterp, RomMethod::Pod}) {
      OnlineOptions opts;
      opts.method = method;
      opts.eps_loc = 4e-3;
      if (fixed_dims) {
        opts.dim_h = 30;
        opts.dim_q = 50;
      }
      const auto reports = sweep_points(ctx, mus, opts);
      write_aggregate_row(out,
                          std::to_string(nl) + "x" + std::to_string(nr) + "_" +
                              to_string(method),
                          aggregate(reports, AggregateMode::OverDomain));
    }
  }
}

void cmd_oracle(const std::string& kind, double hl, double hr, double t,
                double g, const std::string& out_path) {
  if (kind == "slope") {
    Eigen::VectorXd samples(9);
    for (int i = 0; i < 9; ++i)
      samples[i] = 1e-6 * std::pow(10.0, 4.0 * i / 8.0);  // [1e-6, 1e-2]
    const SensitivityReport rep = sensitivity_slope(hl, g, samples);
    std::cout << "slope_dhm_dhR=" << rep.slope_dhm
              << " slope_hm=" << rep.slope_hm << "\n";
    return;
  }
  const double x_dam = 50.0;
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << "x,u,h\n";
  const int n = 400;
  for (int i = 1; i <= n; ++i) {
    const double x = 100.0 * i / n;
    const PointValue pv = kind == "dry"
                              ? dry_bed_solution(x, t, hl, g, x_dam)
                              : wet_bed_solution(x, t, hl, hr, g, x_dam);
    out << x << "," << fmt(pv.u) << "," << fmt(pv.h) << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor reduced-order modeling for the 1D dam-break problem"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string grid_spec = "13x17";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--store", o.store, "snapshot store path");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--nx", o.cfg.Nx, "interior cell count");
    cmd->add_option("--t-final", o.cfg.T, "final time");
    cmd->add_option("--cfl", o.cfg.cfl, "Courant number");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--workers", o.workers, "worker count");
  };

  // offline generate / compress
  CLI::App* offline = app.add_subcommand("offline", "offline pipeline stages");
  offline->require_subcommand(1);
  CLI::App* gen = offline->add_subcommand("generate",
                                          "run the FOM over the grid");
  add_common(gen);
  gen->add_option("--grid", grid_spec, "training grid NLxNR");
  gen->add_option("--hr-nodes", o.hr_kind, "hR node kind")
      ->check(CLI::IsMember({"uniform", "chebyshev"}));
  CLI::App* compress = offline->add_subcommand("compress",
                                               "HOSVD-compress the store");
  add_common(compress);
  compress->add_option("--eps-h", o.eps_h, "depth tensor tolerance");
  compress->add_option("--eps-q", o.eps_q, "discharge tensor tolerance");

  // online solve
  CLI::App* online = app.add_subcommand("online", "online pipeline stages");
  online->require_subcommand(1);
  CLI::App* solve = online->add_subcommand("solve", "ROM at a new parameter");
  add_common(solve);
  double hl = 25.0, hr = 3.0, eps_loc = 4e-3, t_oracle = 1.0;
  int p = 2, points = 80, mc_samples = 64;
  std::string method = "noninterp", dims, preset, oracle_kind = "dry";
  std::string oracle_out = "oracle.csv";
  solve->add_option("--hl", hl, "left depth hL*")->required();
  solve->add_option("--hr", hr, "right depth hR*")->required();
  solve->add_option("--method", method, "basis construction method")
      ->check(CLI::IsMember({"interp", "noninterp", "pod"}));
  solve->add_option("--eps-loc", eps_loc, "local energy threshold");
  solve->add_option("--p", p, "Lagrange interpolation order");
  solve->add_option("--dims", dims, "fixed dimensions LH,LQ");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "experiment presets");
  add_common(sweep);
  sweep->add_option("preset", preset, "table2|table4|table5|table6|table7")
      ->required()
      ->check(CLI::IsMember({"table2", "table4", "table5", "table6",
                             "table7"}));
  sweep->add_option("--points", points, "hR evaluation points");
  sweep->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");

  // oracle
  CLI::App* oracle = app.add_subcommand("oracle", "analytical solutions");
  oracle->add_option("kind", oracle_kind, "dry|wet|slope")
      ->required()
      ->check(CLI::IsMember({"dry", "wet", "slope"}));
  oracle->add_option("--hl", hl, "left depth");
  oracle->add_option("--hr", hr, "right depth");
  oracle->add_option("--t", t_oracle, "evaluation time");
  oracle->add_option("--out", oracle_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      o.grid = parse_grid(grid_spec);
      offline_generate(o.store, make_grid(o), o.cfg, o.seed, o.workers);
      std::cout << "store ready: " << o.store << "\n";
    } else if (compress->parsed()) {
      SnapshotStore store = SnapshotStore::open(o.store);
      offline_compress(store, o.eps_h, o.eps_q);
      std::cout << "compressed: err_h=" << store.tucker_meta().measured_err_h
                << " err_q=" << store.tucker_meta().measured_err_q << "\n";
    } else if (solve->parsed()) {
      cmd_online_solve(o, hl, hr, method, eps_loc, p, dims);
    } else if (sweep->parsed()) {
      if (preset == "table2") preset_table2(o, points);
      else if (preset == "table4") preset_table4(o, points);
      else if (preset == "table5") preset_table5(o, points);
      else if (preset == "table6") preset_table_pod(o, mc_samples, false,
                                                    "table6");
      else preset_table_pod(o, mc_samples, true, "table7");
      std::cout << "wrote " << o.out << "/" << preset << ".csv\n";
    } else if (oracle->parsed()) {
      cmd_oracle(oracle_kind, hl, hr, t_oracle, 9.81, oracle_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
