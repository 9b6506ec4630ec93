#include "osmorom/offline/archive.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "osmorom/errors.hpp"
#include "osmorom/util/csv.hpp"
#include "osmorom/util/hash.hpp"

namespace osmorom::offline {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "archives are written in host byte order");

namespace {

constexpr const char* kFormat = "osmorom-archive";

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

std::vector<double> split(const std::string& s) {
  // strtod, unlike stream extraction, accepts subnormal values.
  std::vector<double> v;
  const char* p = s.c_str();
  char* end = nullptr;
  for (double x = std::strtod(p, &end); end != p; x = std::strtod(p, &end)) {
    v.push_back(x);
    p = end;
  }
  return v;
}

std::vector<int> split_int(const std::string& s) {
  std::vector<int> v;
  for (double x : split(s)) v.push_back(static_cast<int>(x));
  return v;
}

const char* ip_name(fem::InnerProductKind k) {
  switch (k) {
    case fem::InnerProductKind::h1_scalar: return "h1_scalar";
    case fem::InnerProductKind::h1_vector: return "h1_vector";
    case fem::InnerProductKind::l2_boundary_vector: return "l2_boundary_vector";
  }
  return "";
}

fem::InnerProductKind ip_kind(const std::string& s) {
  if (s == "h1_scalar") return fem::InnerProductKind::h1_scalar;
  if (s == "h1_vector") return fem::InnerProductKind::h1_vector;
  if (s == "l2_boundary_vector") return fem::InnerProductKind::l2_boundary_vector;
  throw FormatVersionMismatch("unknown inner product '" + s + "'");
}

Eigen::MatrixXd from_ints(const std::vector<int>& v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

std::vector<int> to_ints(const Eigen::MatrixXd& m) {
  std::vector<int> v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) v[static_cast<std::size_t>(i)] = static_cast<int>(m(i));
  return v;
}

Eigen::MatrixXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd parameter_table(const std::vector<fom::Parameters>& ps, int num_shapes) {
  Eigen::MatrixXd t(static_cast<Eigen::Index>(ps.size()), 4 + num_shapes);
  for (std::size_t r = 0; r < ps.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    t(i, 0) = ps[r].alpha;
    t(i, 1) = ps[r].beta;
    t(i, 2) = ps[r].gamma;
    t(i, 3) = ps[r].u_ext;
    for (int l = 0; l < num_shapes; ++l) t(i, 4 + l) = ps[r].delta.at(static_cast<std::size_t>(l));
  }
  return t;
}

fom::Parameters parameter_row(const Eigen::MatrixXd& t, Eigen::Index i) {
  fom::Parameters p;
  p.alpha = t(i, 0);
  p.beta = t(i, 1);
  p.gamma = t(i, 2);
  p.u_ext = t(i, 3);
  for (Eigen::Index l = 4; l < t.cols(); ++l) p.delta.push_back(t(i, l));
  return p;
}

void write_basis(ArchiveWriter& w, const std::string& name, const ReducedBasis& b) {
  w.meta(name + ".inner_product", ip_name(b.ip_kind));
  w.meta(name + ".eps_rb", b.eps_rb);
  w.meta(name + ".constant_included", b.constant_included ? 1 : 0);
  w.array(name + ".modes", b.modes);
  w.array(name + ".singular_values", b.singular_values);
}

ReducedBasis read_basis(const ArchiveReader& r, const std::string& name) {
  ReducedBasis b;
  b.ip_kind = ip_kind(r.text(name + ".inner_product"));
  b.eps_rb = r.real(name + ".eps_rb");
  b.constant_included = r.integer(name + ".constant_included") != 0;
  b.modes = r.array(name + ".modes");
  b.singular_values = r.array(name + ".singular_values");
  return b;
}

}  // namespace

std::string format_double(double x) { return util::csv_number(x); }

ArchiveWriter::ArchiveWriter(fs::path dir, std::string schema) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  lines_.emplace_back("format", kFormat);
  lines_.emplace_back("schema", std::move(schema));
  lines_.emplace_back("version", std::to_string(kArchiveVersion));
}

void ArchiveWriter::meta(const std::string& key, const std::string& value) {
  if (key.find('=') != std::string::npos || value.find('\n') != std::string::npos)
    throw ConfigError("invalid manifest entry '" + key + "'");
  lines_.emplace_back(key, value);
}

void ArchiveWriter::meta(const std::string& key, double value) { meta(key, format_double(value)); }
void ArchiveWriter::meta(const std::string& key, int value) { meta(key, std::to_string(value)); }

void ArchiveWriter::array(const std::string& name, const Eigen::MatrixXd& values) {
  const std::size_t bytes = static_cast<std::size_t>(values.size()) * sizeof(double);
  std::ofstream os(dir_ / (name + ".bin"), std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(bytes));
  if (!os) throw Error("cannot write array " + name + " in " + dir_.string());
  lines_.emplace_back("array." + name, std::to_string(values.rows()) + " " + std::to_string(values.cols()) + " " +
                                           util::sha256_hex(values.data(), bytes));
}

void ArchiveWriter::finish() {
  std::ofstream os(dir_ / "manifest.txt", std::ios::trunc);
  for (const auto& [k, v] : lines_) os << k << '=' << v << '\n';
  if (!os) throw Error("cannot write manifest in " + dir_.string());
}

ArchiveReader::ArchiveReader(fs::path dir, const std::string& schema) : dir_(std::move(dir)) {
  std::ifstream is(dir_ / "manifest.txt");
  if (!is) throw FormatVersionMismatch("no manifest in " + dir_.string());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("array.", 0) == 0) {
      Entry e;
      std::istringstream ls(value);
      if (!(ls >> e.rows >> e.cols >> e.sha)) throw ChecksumMismatch("malformed array entry " + key);
      arrays_[key.substr(6)] = e;
    } else {
      meta_[key] = value;
    }
  }
  if (!has("format") || text("format") != kFormat) throw FormatVersionMismatch(dir_.string() + " is not an archive");
  if (text("schema") != schema)
    throw FormatVersionMismatch("expected a " + schema + " archive, found " + text("schema"));
  if (integer("version") != kArchiveVersion)
    throw FormatVersionMismatch("archive version " + text("version") + ", expected " +
                                std::to_string(kArchiveVersion));
}

const std::string& ArchiveReader::text(const std::string& key) const {
  const auto it = meta_.find(key);
  if (it == meta_.end()) throw FormatVersionMismatch("manifest lacks '" + key + "'");
  return it->second;
}

double ArchiveReader::real(const std::string& key) const {
  const std::string& s = text(key);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw FormatVersionMismatch("'" + key + "' is not a number");
  return x;
}
int ArchiveReader::integer(const std::string& key) const { return std::stoi(text(key)); }

Eigen::MatrixXd ArchiveReader::array(const std::string& name) const {
  const auto it = arrays_.find(name);
  if (it == arrays_.end()) throw FormatVersionMismatch("manifest lacks array '" + name + "'");
  const Entry& e = it->second;
  Eigen::MatrixXd m(e.rows, e.cols);
  const std::size_t bytes = static_cast<std::size_t>(m.size()) * sizeof(double);
  const fs::path path = dir_ / (name + ".bin");
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec || size != bytes) throw ChecksumMismatch("array file " + path.string() + " has the wrong size");
  std::ifstream is(path, std::ios::binary);
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(bytes));
  if (!is || util::sha256_hex(m.data(), bytes) != e.sha)
    throw ChecksumMismatch("checksum mismatch in " + path.string());
  return m;
}

void save_model(const fs::path& dir, const ReducedModel& model) {
  ArchiveWriter w(dir, "reduced-model");
  const TrainingConfig& c = model.config;
  w.meta("num_shapes", model.num_shapes);
  w.meta("config.mesh_h", c.mesh_h);
  w.meta("config.domain_lo", join(c.domain.lo));
  w.meta("config.domain_hi", join(c.domain.hi));
  std::vector<double> grid(c.grid.begin(), c.grid.end());
  w.meta("config.grid", join(grid));
  w.meta("config.eps_rb", c.eps_rb);
  w.meta("config.eps_ei", c.eps_ei);
  w.meta("config.N", c.N);
  w.meta("config.dt", c.dt);
  w.meta("config.eim_stride", c.eim_stride);
  w.meta("config.max_modes", c.max_modes);
  w.meta("config.max_eim", c.max_eim);
  w.meta("config.complete_bases", c.complete_bases ? 1 : 0);
  w.meta("config.with_variance", c.with_variance ? 1 : 0);
  w.meta("config.workers", c.workers);
  w.meta("k_bnd", model.k_bnd());
  w.meta("k_def", model.k_def());
  w.meta("k_conc", model.k_conc());
  for (int i = 1; i <= 7; ++i) w.meta("M" + std::to_string(i), model.m(i));
  w.meta("norm_one", model.norm_one);
  w.meta("has_variance", model.has_variance ? 1 : 0);
  w.array("config.explicit_parameters", parameter_table(c.explicit_parameters, model.num_shapes));

  write_basis(w, "bnd", model.bnd);
  write_basis(w, "def", model.def);
  write_basis(w, "conc", model.conc);
  for (int i = 1; i <= 7; ++i) {
    const std::string p = "eim" + std::to_string(i);
    const EimData& e = model.eim[i - 1];
    w.meta(p + ".set", e.set == fem::PointSet::volume ? "volume" : "boundary");
    w.meta(p + ".components", e.components);
    w.meta(p + ".eps_ei", e.eps_ei);
    w.array(p + ".basis", e.basis);
    w.array(p + ".index", from_ints(e.index));
    w.array(p + ".interpolation", e.interpolation);
    w.array(p + ".gamma", e.gamma);
    w.array(p + ".error_history", from_vector(e.error_history));
    const std::string g = "geometry" + std::to_string(i);
    const InterpolationGeometry& geo = model.geometry[i - 1];
    w.array(g + ".component", from_ints(geo.component));
    w.array(g + ".dF", geo.dF);
    w.array(g + ".eta", geo.eta);
    w.array(g + ".phi", geo.phi);
    w.array(g + ".normal", geo.normal);
    w.array(g + ".interpolation", geo.interpolation);
  }
  for (int f = 0; f < 5; ++f)
    for (std::size_t m = 0; m < model.a[f].size(); ++m)
      w.array("a" + std::to_string(f + 1) + "." + std::to_string(m), model.a[f][m]);
  for (int f = 0; f < 2; ++f)
    for (std::size_t m = 0; m < model.l[f].size(); ++m)
      w.array("l" + std::to_string(f + 1) + "." + std::to_string(m), model.l[f][m]);
  w.array("extension", model.extension);
  w.array("u0", model.u0);
  w.array("shapes0", model.shapes0);
  w.array("mass0", model.mass0);
  w.array("mass1", model.mass1);
  w.array("mass2", model.mass2);
  if (model.has_variance) {
    w.array("var0", model.var0);
    w.array("var1", model.var1);
    w.array("var2", model.var2);
  }
  w.finish();
}

ReducedModel load_model(const fs::path& dir) {
  const ArchiveReader r(dir, "reduced-model");
  ReducedModel model;
  TrainingConfig& c = model.config;
  model.num_shapes = r.integer("num_shapes");
  c.mesh_h = r.real("config.mesh_h");
  c.domain.lo = split(r.text("config.domain_lo"));
  c.domain.hi = split(r.text("config.domain_hi"));
  c.grid = split_int(r.text("config.grid"));
  c.eps_rb = r.real("config.eps_rb");
  c.eps_ei = r.real("config.eps_ei");
  c.N = r.integer("config.N");
  c.dt = r.real("config.dt");
  c.eim_stride = r.integer("config.eim_stride");
  c.max_modes = r.integer("config.max_modes");
  c.max_eim = r.integer("config.max_eim");
  c.complete_bases = r.integer("config.complete_bases") != 0;
  c.with_variance = r.integer("config.with_variance") != 0;
  c.workers = r.integer("config.workers");
  const Eigen::MatrixXd params = r.array("config.explicit_parameters");
  for (Eigen::Index i = 0; i < params.rows(); ++i) c.explicit_parameters.push_back(parameter_row(params, i));
  model.norm_one = r.real("norm_one");
  model.has_variance = r.integer("has_variance") != 0;

  model.bnd = read_basis(r, "bnd");
  model.def = read_basis(r, "def");
  model.conc = read_basis(r, "conc");
  for (int i = 1; i <= 7; ++i) {
    const std::string p = "eim" + std::to_string(i);
    EimData& e = model.eim[i - 1];
    e.id = i;
    e.set = r.text(p + ".set") == "volume" ? fem::PointSet::volume : fem::PointSet::boundary;
    e.components = r.integer(p + ".components");
    e.eps_ei = r.real(p + ".eps_ei");
    e.basis = r.array(p + ".basis");
    e.index = to_ints(r.array(p + ".index"));
    e.interpolation = r.array(p + ".interpolation");
    e.gamma = r.array(p + ".gamma");
    const Eigen::MatrixXd h = r.array(p + ".error_history");
    e.error_history.assign(h.data(), h.data() + h.size());
    const std::string g = "geometry" + std::to_string(i);
    InterpolationGeometry& geo = model.geometry[i - 1];
    geo.component = to_ints(r.array(g + ".component"));
    geo.dF = r.array(g + ".dF");
    geo.eta = r.array(g + ".eta");
    geo.phi = r.array(g + ".phi");
    geo.normal = r.array(g + ".normal");
    geo.interpolation = r.array(g + ".interpolation");
    if (geo.size() != r.integer("M" + std::to_string(i)))
      throw DimensionMismatch("interpolation size of c" + std::to_string(i) + " disagrees with the manifest");
  }
  for (int f = 0; f < 5; ++f)
    for (int m = 0; m < model.m(f + 1); ++m)
      model.a[f].push_back(r.array("a" + std::to_string(f + 1) + "." + std::to_string(m)));
  for (int f = 0; f < 2; ++f)
    for (int m = 0; m < model.m(f + 6); ++m)
      model.l[f].push_back(r.array("l" + std::to_string(f + 1) + "." + std::to_string(m)));
  model.extension = r.array("extension");
  model.u0 = r.array("u0");
  model.shapes0 = r.array("shapes0");
  model.mass0 = r.array("mass0");
  model.mass1 = r.array("mass1");
  model.mass2 = r.array("mass2");
  if (model.has_variance) {
    model.var0 = r.array("var0");
    model.var1 = r.array("var1");
    model.var2 = r.array("var2");
  }
  if (model.k_bnd() != r.integer("k_bnd") || model.k_def() != r.integer("k_def") ||
      model.k_conc() != r.integer("k_conc"))
    throw DimensionMismatch("basis sizes disagree with the manifest");
  return model;
}

void save_trajectory(const fs::path& dir, const fom::Trajectory& trajectory) {
  if (trajectory.states.empty()) throw EmptySnapshotSet("cannot save an empty trajectory");
  ArchiveWriter w(dir, "fom-trajectory");
  const auto& s0 = trajectory.states.front();
  const auto n = static_cast<Eigen::Index>(trajectory.states.size());
  w.meta("steps", static_cast<int>(n) - 1);
  w.meta("dt", trajectory.dt);
  w.meta("wall_time", trajectory.wall_time);
  w.meta("mu", trajectory.mu.to_string());
  w.array("mu", parameter_table({trajectory.mu}, static_cast<int>(trajectory.mu.delta.size())));
  Eigen::MatrixXd t(n, 1), u(s0.u.values.size(), n), psi(s0.psi.values.size(), n),
      qb(s0.q_bnd.values.size(), n), qv(s0.q_vol_prev.values.size(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = trajectory.states[static_cast<std::size_t>(k)];
    if (s.n != k) throw DimensionMismatch("trajectory steps are not contiguous");
    t(k, 0) = s.t;
    u.col(k) = s.u.values;
    psi.col(k) = s.psi.values;
    qb.col(k) = s.q_bnd.values;
    qv.col(k) = s.q_vol_prev.values;
  }
  w.array("t", t);
  w.array("u", u);
  w.array("psi", psi);
  w.array("q_bnd", qb);
  w.array("q_vol_prev", qv);
  w.finish();
}

fom::Trajectory load_trajectory(const fs::path& dir) {
  const ArchiveReader r(dir, "fom-trajectory");
  fom::Trajectory traj;
  traj.dt = r.real("dt");
  traj.wall_time = r.real("wall_time");
  traj.mu = parameter_row(r.array("mu"), 0);
  const Eigen::MatrixXd t = r.array("t");
  const Eigen::MatrixXd u = r.array("u");
  const Eigen::MatrixXd psi = r.array("psi");
  const Eigen::MatrixXd qb = r.array("q_bnd");
  const Eigen::MatrixXd qv = r.array("q_vol_prev");
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    fom::FomState s;
    s.n = static_cast<int>(k);
    s.t = t(k, 0);
    s.u = fem::Field::scalar(u.col(k));
    s.psi = fem::Field::vector(psi.col(k));
    s.q_bnd.values = qb.col(k);
    s.q_vol_prev = fem::Field::vector(qv.col(k));
    traj.states.push_back(std::move(s));
  }
  return traj;
}

}  // namespace osmorom::offline
