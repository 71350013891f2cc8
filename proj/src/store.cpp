#include "trom/store.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace trom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'R', 'O', 'M'};

std::size_t header_size(std::uint32_t ndim) {
  return 4 + sizeof(std::uint32_t) * 2 + sizeof(std::uint64_t) * ndim;
}

void write_header(std::ostream& out, const std::vector<std::uint64_t>& dims) {
  out.write(kMagic, 4);
  const std::uint32_t version = kStoreLayoutVersion;
  const std::uint32_t ndim = static_cast<std::uint32_t>(dims.size());
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&ndim), sizeof(ndim));
  for (std::uint64_t d : dims)
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
}

std::vector<std::uint64_t> read_header(std::istream& in,
                                       const std::string& what) {
  char magic[4];
  std::uint32_t version = 0, ndim = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&ndim), sizeof(ndim));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad array header in " + what);
  if (version != kStoreLayoutVersion)
    throw IoError("unsupported layout version in " + what);
  if (ndim == 0 || ndim > 4) throw IoError("bad ndim in " + what);
  std::vector<std::uint64_t> dims(ndim);
  for (auto& d : dims) in.read(reinterpret_cast<char*>(&d), sizeof(d));
  if (!in) throw IoError("truncated header in " + what);
  return dims;
}

void write_payload(std::ostream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_payload(std::istream& in, double* data, std::size_t n,
                  const std::string& what) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("truncated payload in " + what);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

// Matrices are persisted row-major to match the documented layout.
void write_matrix_record(std::ostream& out, const Eigen::MatrixXd& m) {
  write_header(out, {static_cast<std::uint64_t>(m.rows()),
                     static_cast<std::uint64_t>(m.cols())});
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor rm = m;
  write_payload(out, rm.data(), static_cast<std::size_t>(rm.size()));
}

Eigen::MatrixXd read_matrix_record(std::istream& in, const std::string& what) {
  const auto dims = read_header(in, what);
  if (dims.size() != 2) throw IoError("expected 2-d array in " + what);
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor rm(static_cast<Eigen::Index>(dims[0]),
              static_cast<Eigen::Index>(dims[1]));
  read_payload(in, rm.data(), static_cast<std::size_t>(rm.size()), what);
  return rm;
}

}  // namespace

void save_tensor(const fs::path& path, const Tensor4& t) {
  auto out = open_out(path);
  const auto& d = t.dims();
  write_header(out, {static_cast<std::uint64_t>(d[0]),
                     static_cast<std::uint64_t>(d[1]),
                     static_cast<std::uint64_t>(d[2]),
                     static_cast<std::uint64_t>(d[3])});
  write_payload(out, t.data().data(), static_cast<std::size_t>(t.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Tensor4 load_tensor(const fs::path& path) {
  auto in = open_in(path);
  const auto dims = read_header(in, path.string());
  if (dims.size() != 4) throw IoError("expected 4-d array in " + path.string());
  Tensor4 t({static_cast<Eigen::Index>(dims[0]),
             static_cast<Eigen::Index>(dims[1]),
             static_cast<Eigen::Index>(dims[2]),
             static_cast<Eigen::Index>(dims[3])});
  read_payload(in, t.data().data(), static_cast<std::size_t>(t.size()),
               path.string());
  return t;
}

void save_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  write_matrix_record(out, m);
  if (!out) throw IoError("write failed for " + path.string());
}

Eigen::MatrixXd load_matrix(const fs::path& path) {
  auto in = open_in(path);
  return read_matrix_record(in, path.string());
}

std::string file_hash(const fs::path& path) {
  auto in = open_in(path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

namespace {

json grid_to_json(const ParameterGrid& grid) {
  json j;
  j["hL_nodes"] = std::vector<double>(grid.hL_nodes.begin(),
                                      grid.hL_nodes.end());
  j["hR_nodes"] = std::vector<double>(grid.hR_nodes.begin(),
                                      grid.hR_nodes.end());
  j["hR_kind"] = to_string(grid.hR_kind);
  j["box"] = {grid.box.hL_min, grid.box.hL_max, grid.box.hR_min,
              grid.box.hR_max};
  return j;
}

ParameterGrid grid_from_json(const json& j) {
  ParameterGrid grid;
  const auto hl = j.at("hL_nodes").get<std::vector<double>>();
  const auto hr = j.at("hR_nodes").get<std::vector<double>>();
  grid.hL_nodes = Eigen::Map<const Eigen::VectorXd>(hl.data(), hl.size());
  grid.hR_nodes = Eigen::Map<const Eigen::VectorXd>(hr.data(), hr.size());
  grid.hR_kind = node_kind_from_string(j.at("hR_kind").get<std::string>());
  const auto box = j.at("box").get<std::vector<double>>();
  grid.box = {box.at(0), box.at(1), box.at(2), box.at(3)};
  return grid;
}

json config_to_json(const RunConfig& cfg) {
  return {{"g", cfg.g},       {"Lx", cfg.Lx},
          {"Nx", cfg.Nx},     {"x_dam", cfg.x_dam},
          {"T", cfg.T},       {"cfl", cfg.cfl},
          {"snapshot_count", cfg.snapshot_count}};
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.g = j.at("g");
  cfg.Lx = j.at("Lx");
  cfg.Nx = j.at("Nx");
  cfg.x_dam = j.at("x_dam");
  cfg.T = j.at("T");
  cfg.cfl = j.at("cfl");
  cfg.snapshot_count = j.at("snapshot_count");
  return cfg;
}

}  // namespace

SnapshotStore SnapshotStore::create(const fs::path& dir,
                                    const ParameterGrid& grid,
                                    const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SnapshotStore store;
  store.dir_ = dir;
  store.grid_ = grid;
  store.cfg_ = cfg;
  store.seed_ = seed;
  fs::create_directories(dir);
  fs::create_directories(dir / "fom_cache");

  // Allocate the full-size tensor files upfront; slices are written in place.
  for (char var : {'h', 'q'}) {
    const fs::path path = store.tensor_path(var);
    auto out = open_out(path);
    write_header(out, {static_cast<std::uint64_t>(cfg.Nx),
                       static_cast<std::uint64_t>(grid.hL_nodes.size()),
                       static_cast<std::uint64_t>(grid.hR_nodes.size()),
                       static_cast<std::uint64_t>(cfg.snapshot_count)});
    out.close();
    const std::uintmax_t payload =
        static_cast<std::uintmax_t>(cfg.Nx) * grid.hL_nodes.size() *
        grid.hR_nodes.size() * cfg.snapshot_count * sizeof(double);
    fs::resize_file(path, header_size(4) + payload);
  }
  store.save_manifest();
  return store;
}

SnapshotStore SnapshotStore::open(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot read " + manifest.string());
  json j;
  in >> j;

  SnapshotStore store;
  store.dir_ = dir;
  store.grid_ = grid_from_json(j.at("grid"));
  store.cfg_ = config_from_json(j.at("run_config"));
  store.seed_ = j.at("seed").get<std::uint64_t>();
  for (const auto& pair : j.at("completed"))
    store.completed_.insert({pair.at(0).get<int>(), pair.at(1).get<int>()});
  if (j.contains("tucker")) {
    const json& t = j.at("tucker");
    TuckerMeta meta;
    meta.eps_h = t.at("eps_h");
    meta.eps_q = t.at("eps_q");
    for (int m = 0; m < 4; ++m) {
      meta.ranks_h[m] = t.at("ranks_h").at(m).get<Eigen::Index>();
      meta.ranks_q[m] = t.at("ranks_q").at(m).get<Eigen::Index>();
    }
    meta.measured_err_h = t.at("measured_err_h");
    meta.measured_err_q = t.at("measured_err_q");
    store.tucker_ = meta;
  }
  return store;
}

void SnapshotStore::save_manifest() const {
  json j;
  j["layout_version"] = kStoreLayoutVersion;
  j["grid"] = grid_to_json(grid_);
  j["run_config"] = config_to_json(cfg_);
  j["seed"] = seed_;
  j["rng"] = "mt19937_64";
  json done = json::array();
  for (const auto& [i, k] : completed_) done.push_back({i, k});
  j["completed"] = done;
  if (tucker_) {
    j["tucker"] = {{"eps_h", tucker_->eps_h},
                   {"eps_q", tucker_->eps_q},
                   {"ranks_h", tucker_->ranks_h},
                   {"ranks_q", tucker_->ranks_q},
                   {"measured_err_h", tucker_->measured_err_h},
                   {"measured_err_q", tucker_->measured_err_q}};
  }
  std::ofstream out(dir_ / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir_ / "manifest.json").string());
  out << j.dump(2) << "\n";
}

fs::path SnapshotStore::tensor_path(char var) const {
  return dir_ / (std::string("q") + var + ".bin");
}

bool SnapshotStore::all_slices_done() const {
  return static_cast<Eigen::Index>(completed_.size()) ==
         grid_.hL_nodes.size() * grid_.hR_nodes.size();
}

void SnapshotStore::write_slice(int i, int j, const Eigen::MatrixXd& h_slice,
                                const Eigen::MatrixXd& q_slice) {
  const Eigen::Index nx = cfg_.Nx;
  const Eigen::Index nl = grid_.hL_nodes.size();
  const Eigen::Index nr = grid_.hR_nodes.size();
  const Eigen::Index nt = cfg_.snapshot_count;
  if (i < 0 || i >= nl || j < 0 || j >= nr)
    throw ValidationError("write_slice: index out of range");
  if (h_slice.rows() != nx || h_slice.cols() != nt ||
      q_slice.rows() != nx || q_slice.cols() != nt)
    throw ValidationError("write_slice: slice shape mismatch");

  for (char var : {'h', 'q'}) {
    const Eigen::MatrixXd& slice = var == 'h' ? h_slice : q_slice;
    std::fstream out(tensor_path(var),
                     std::ios::binary | std::ios::in | std::ios::out);
    if (!out) throw IoError("cannot update " + tensor_path(var).string());
    std::vector<double> row(nt);
    for (Eigen::Index ix = 0; ix < nx; ++ix) {
      for (Eigen::Index k = 0; k < nt; ++k) row[k] = slice(ix, k);
      const std::uint64_t elem = ((static_cast<std::uint64_t>(ix) * nl + i) *
                                      nr + j) * nt;
      out.seekp(static_cast<std::streamoff>(header_size(4) +
                                            elem * sizeof(double)));
      write_payload(out, row.data(), row.size());
    }
    if (!out) throw IoError("write failed for " + tensor_path(var).string());
  }
  completed_.insert({i, j});
  save_manifest();
}

Tensor4 SnapshotStore::load_qh() const { return load_tensor(tensor_path('h')); }
Tensor4 SnapshotStore::load_qq() const { return load_tensor(tensor_path('q')); }

const TuckerMeta& SnapshotStore::tucker_meta() const {
  if (!tucker_) throw IoError("store has no Tucker models");
  return *tucker_;
}

void SnapshotStore::save_tucker(const TuckerModel& model_h,
                                const TuckerModel& model_q,
                                double measured_err_h, double measured_err_q) {
  for (const auto& [tag, model] :
       {std::pair<char, const TuckerModel*>{'h', &model_h},
        std::pair<char, const TuckerModel*>{'q', &model_q}}) {
    const std::string stem = std::string("tucker_") + tag;
    save_tensor(dir_ / (stem + "_core.bin"), model->core);
    for (int m = 0; m < 4; ++m)
      save_matrix(dir_ / (stem + "_f" + std::to_string(m + 1) + ".bin"),
                  model->factors[m]);
  }
  TuckerMeta meta;
  meta.eps_h = model_h.eps;
  meta.eps_q = model_q.eps;
  meta.ranks_h = model_h.ranks();
  meta.ranks_q = model_q.ranks();
  meta.measured_err_h = measured_err_h;
  meta.measured_err_q = measured_err_q;
  tucker_ = meta;
  save_manifest();
}

namespace {

TuckerModel load_tucker_files(const fs::path& dir, char tag, double eps) {
  const std::string stem = std::string("tucker_") + tag;
  TuckerModel model;
  model.core = load_tensor(dir / (stem + "_core.bin"));
  for (int m = 0; m < 4; ++m)
    model.factors[m] =
        load_matrix(dir / (stem + "_f" + std::to_string(m + 1) + ".bin"));
  model.eps = eps;
  return model;
}

}  // namespace

TuckerModel SnapshotStore::load_tucker_h() const {
  return load_tucker_files(dir_, 'h', tucker_meta().eps_h);
}

TuckerModel SnapshotStore::load_tucker_q() const {
  return load_tucker_files(dir_, 'q', tucker_meta().eps_q);
}

namespace {

std::string fom_cache_key(const ParameterPair& mu, const RunConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%.17g_%.17g_%.17g_%.17g_%d_%.17g_%.17g_%.17g_%d", mu.hL,
                mu.hR, cfg.g, cfg.Lx, cfg.Nx, cfg.x_dam, cfg.T, cfg.cfl,
                cfg.snapshot_count);
  std::uint64_t h = 14695981039346656037ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace

std::optional<Trajectory> SnapshotStore::load_cached_fom(
    const ParameterPair& mu) const {
  const fs::path path =
      dir_ / "fom_cache" / (fom_cache_key(mu, cfg_) + ".bin");
  if (!fs::exists(path)) return std::nullopt;
  auto in = open_in(path);
  const Eigen::MatrixXd times = read_matrix_record(in, path.string());
  const Eigen::MatrixXd h = read_matrix_record(in, path.string());
  const Eigen::MatrixXd q = read_matrix_record(in, path.string());
  Trajectory traj;
  traj.times.assign(times.data(), times.data() + times.size());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    FieldState s;
    s.h = h.col(j);
    s.q = q.col(j);
    s.t = traj.times[static_cast<std::size_t>(j)];
    traj.states.push_back(std::move(s));
  }
  return traj;
}

void SnapshotStore::cache_fom(const ParameterPair& mu,
                              const Trajectory& traj) const {
  const fs::path path =
      dir_ / "fom_cache" / (fom_cache_key(mu, cfg_) + ".bin");
  auto out = open_out(path);
  Eigen::MatrixXd times(1, static_cast<Eigen::Index>(traj.times.size()));
  for (std::size_t j = 0; j < traj.times.size(); ++j)
    times(0, static_cast<Eigen::Index>(j)) = traj.times[j];
  write_matrix_record(out, times);
  Eigen::MatrixXd h(traj.states[0].h.size(),
                    static_cast<Eigen::Index>(traj.states.size()));
  Eigen::MatrixXd q(h.rows(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    h.col(j) = traj.states[static_cast<std::size_t>(j)].h;
    q.col(j) = traj.states[static_cast<std::size_t>(j)].q;
  }
  write_matrix_record(out, h);
  write_matrix_record(out, q);
  if (!out) throw IoError("write failed for " + path.string());
}

std::string SnapshotStore::manifest_hash() const {
  return file_hash(dir_ / "manifest.json");
}

}  // namespace trom
