#include "osmorom/harness/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "osmorom/errors.hpp"
#include "osmorom/util/csv.hpp"

namespace osmorom::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) throw ConfigError(key + ": '" + v + "' is not a number");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw ConfigError(key + ": '" + v + "' is not an integer");
  return x;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_integer(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

// Comma or 'x' separated lists, e.g. "1e-1,1e-2" or "3x3x3x3".
std::vector<std::string> items(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == 'x' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : items(v)) out.push_back(to_double(key, s));
  if (out.empty()) throw ConfigError(key + " is empty");
  return out;
}

std::string num(double x) { return util::csv_number(x); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

const char* kAxes[] = {"alpha", "beta", "delta1", "delta2"};

}  // namespace

std::string study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::fom: return "fom";
    case StudyKind::offline: return "offline";
    case StudyKind::rom: return "rom";
    case StudyKind::error_surface: return "error-surface";
    case StudyKind::conservation: return "conservation";
    case StudyKind::speedup: return "speedup";
    case StudyKind::svd_compare: return "svd-compare";
    case StudyKind::variance: return "variance";
  }
  return "";
}

StudyKind parse_study_kind(const std::string& name) {
  for (auto k : {StudyKind::fom, StudyKind::offline, StudyKind::rom, StudyKind::error_surface,
                 StudyKind::conservation, StudyKind::speedup, StudyKind::svd_compare, StudyKind::variance})
    if (study_name(k) == name) return k;
  if (name == "variance-sweep") return StudyKind::variance;
  throw ConfigError("unknown study '" + name + "'");
}

fom::Parameters StudyConfig::default_mu() {
  fom::Parameters p;
  p.alpha = 0.1;
  p.beta = 0.1;
  p.delta = {1.0, 1.0};
  return p;
}

int StudyConfig::steps() const {
  const double r = t_final / dt;
  const long n = std::lround(r);
  if (!(dt > 0.0) || !(t_final > 0.0) || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw ConfigError("t_final must be a positive integer multiple of dt");
  return static_cast<int>(n);
}

offline::TrainingConfig StudyConfig::training(double rb, double ei) const {
  offline::TrainingConfig t;
  t.mesh_h = mesh_h;
  t.domain = domain;
  t.grid = train_grid;
  t.eps_rb = rb;
  t.eps_ei = ei;
  t.N = steps();
  t.dt = dt;
  t.eim_stride = eim_stride;
  t.max_modes = max_modes;
  t.max_eim = max_eim;
  t.workers = workers;
  t.with_variance = true;
  return t;
}

std::vector<fom::Parameters> StudyConfig::test_parameters() const {
  return fom::random_parameters(domain, test_count, seed);
}

void StudyConfig::set(const std::string& key, const std::string& v) {
  for (int a = 0; a < 4; ++a) {
    const std::string axis = kAxes[a];
    if (key == axis + "_range") {
      const auto r = to_doubles(key, v);
      if (r.size() == 1) {
        domain.lo[a] = domain.hi[a] = r[0];
      } else if (r.size() == 2) {
        domain.lo[a] = r[0];
        domain.hi[a] = r[1];
      } else {
        throw ConfigError(key + " needs one or two values");
      }
      return;
    }
    if (key == axis) {
      const double x = to_double(key, v);
      if (a == 0) mu.alpha = x;
      else if (a == 1) mu.beta = x;
      else mu.delta[a - 2] = x;
      return;
    }
  }
  if (key == "mesh_h") mesh_h = to_double(key, v);
  else if (key == "dt") dt = to_double(key, v);
  else if (key == "t_final") t_final = to_double(key, v);
  else if (key == "train_grid") {
    train_grid.clear();
    for (const auto& s : items(v)) train_grid.push_back(to_int(key, s));
  } else if (key == "test_count") test_count = to_int(key, v);
  else if (key == "seed") {
    const long long s = to_integer(key, v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "eps_rb") eps_rb = to_double(key, v);
  else if (key == "eps_ei") eps_ei = to_double(key, v);
  else if (key == "eps_rb_grid") eps_rb_grid = to_doubles(key, v);
  else if (key == "eps_ei_grid") eps_ei_grid = to_doubles(key, v);
  else if (key == "non_conservative") non_conservative = to_bool(key, v);
  else if (key == "eim_stride") eim_stride = to_int(key, v);
  else if (key == "max_modes") max_modes = to_int(key, v);
  else if (key == "max_eim") max_eim = to_int(key, v);
  else if (key == "workers") workers = to_int(key, v);
  else if (key == "out") out = v;
  else if (key == "model") model = v;
  else if (key == "variance_grid") variance_grid = to_int(key, v);
  else if (key == "variance_times") variance_times = to_doubles(key, v);
  else if (key == "background_extent") background_extent = to_double(key, v);
  else if (key == "background_h") background_h = to_double(key, v);
  else if (key == "svd_report") svd_report = to_int(key, v);
  else if (key == "speedup_repeats") speedup_repeats = to_int(key, v);
  else if (key == "rom_repeats") rom_repeats = to_int(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

void StudyConfig::validate() const {
  if (!(mesh_h > 0.0 && mesh_h < 1.0)) throw ConfigError("mesh_h must lie in (0, 1)");
  steps();
  for (int a = 0; a < 4; ++a)
    if (!(domain.lo[a] <= domain.hi[a])) throw ConfigError(std::string(kAxes[a]) + "_range is empty");
  if (!(domain.lo[0] > 0.0 && domain.lo[1] > 0.0)) throw ConfigError("alpha and beta must be positive");
  if (train_grid.size() != 4) throw ConfigError("train_grid needs four counts (alpha, beta, delta1, delta2)");
  for (int c : train_grid)
    if (c < 1) throw ConfigError("train_grid counts must be positive");
  if (test_count < 1) throw ConfigError("test_count must be positive");
  auto tol = [](double e, const char* name) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1]");
  };
  tol(eps_rb, "eps_rb");
  tol(eps_ei, "eps_ei");
  for (double e : eps_rb_grid) tol(e, "eps_rb_grid");
  for (double e : eps_ei_grid) tol(e, "eps_ei_grid");
  mu.validate(2);
  if (eim_stride < 1) throw ConfigError("eim_stride must be positive");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (variance_grid < 1) throw ConfigError("variance_grid must be positive");
  for (double t : variance_times) {
    const double r = t / dt;
    if (t < 0.0 || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ConfigError("variance_times must be non-negative multiples of dt");
  }
  if (!(background_extent > 0.0 && background_h > 0.0 && background_h < background_extent))
    throw ConfigError("invalid background grid");
  if (svd_report < 1) throw ConfigError("svd_report must be positive");
  if (speedup_repeats < 1 || rom_repeats < 1) throw ConfigError("speedup_repeats and rom_repeats must be positive");
}

std::vector<std::pair<std::string, std::string>> StudyConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("mesh_h", num(mesh_h));
  e.emplace_back("dt", num(dt));
  e.emplace_back("t_final", num(t_final));
  for (int a = 0; a < 4; ++a)
    e.emplace_back(std::string(kAxes[a]) + "_range", num(domain.lo[a]) + "," + num(domain.hi[a]));
  e.emplace_back("train_grid", join(train_grid));
  e.emplace_back("test_count", std::to_string(test_count));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("alpha", num(mu.alpha));
  e.emplace_back("beta", num(mu.beta));
  e.emplace_back("delta1", num(mu.delta[0]));
  e.emplace_back("delta2", num(mu.delta[1]));
  e.emplace_back("eps_rb", num(eps_rb));
  e.emplace_back("eps_ei", num(eps_ei));
  e.emplace_back("eps_rb_grid", join(eps_rb_grid));
  e.emplace_back("eps_ei_grid", join(eps_ei_grid));
  e.emplace_back("non_conservative", non_conservative ? "true" : "false");
  e.emplace_back("eim_stride", std::to_string(eim_stride));
  e.emplace_back("max_modes", std::to_string(max_modes));
  e.emplace_back("max_eim", std::to_string(max_eim));
  e.emplace_back("workers", std::to_string(workers));
  e.emplace_back("out", out.string());
  e.emplace_back("model", model.string());
  e.emplace_back("variance_grid", std::to_string(variance_grid));
  e.emplace_back("variance_times", join(variance_times));
  e.emplace_back("background_extent", num(background_extent));
  e.emplace_back("background_h", num(background_h));
  e.emplace_back("svd_report", std::to_string(svd_report));
  e.emplace_back("speedup_repeats", std::to_string(speedup_repeats));
  e.emplace_back("rom_repeats", std::to_string(rom_repeats));
  return e;
}

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return out;
}

void apply_config_file(StudyConfig& config, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  for (const auto& [k, v] : read_key_values(is)) {
    // The model key may be empty in echoed configs.
    if (k == "model" && v.empty()) {
      config.model.clear();
      continue;
    }
    config.set(k, v);
  }
}

void write_config(std::ostream& os, const StudyConfig& config) {
  for (const auto& [k, v] : config.entries()) os << k << '=' << v << '\n';
}

}  // namespace osmorom::harness
