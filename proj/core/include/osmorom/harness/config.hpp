#pragma once

#include <filesystem>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "osmorom/fom/parameters.hpp"
#include "osmorom/offline/campaign.hpp"

namespace osmorom::harness {

enum class StudyKind { fom, offline, rom, error_surface, conservation, speedup, svd_compare, variance };

std::string study_name(StudyKind kind);
/// Accepts fom, offline, rom, error-surface, conservation, speedup,
/// svd-compare, variance (and variance-sweep).
StudyKind parse_study_kind(const std::string& name);

/// Settings shared by all subcommands. Every field has a key in the
/// key=value config format (see `keys()`), so an echoed config reproduces
/// a run exactly.
struct StudyConfig {
  StudyKind kind = StudyKind::fom;

  double mesh_h = 0.1;
  double dt = 0.01;
  double t_final = 1.0;

  fom::ParameterDomain domain = fom::ParameterDomain::standard();
  std::vector<int> train_grid = {3, 3, 3, 3};
  int test_count = 10;
  std::uint64_t seed = 1;
  /// Single parameter for fom, rom and svd-compare.
  fom::Parameters mu = default_mu();

  double eps_rb = 1e-3;
  double eps_ei = 1e-3;
  std::vector<double> eps_rb_grid = {1e-1, 1e-2, 1e-3};
  std::vector<double> eps_ei_grid = {1e-1, 1e-2, 1e-3};
  bool non_conservative = false;

  int eim_stride = 1;
  int max_modes = -1;
  int max_eim = -1;
  int workers = 1;

  std::filesystem::path out = "out";
  std::filesystem::path model;  // empty: <out>/model

  int variance_grid = 50;
  std::vector<double> variance_times = {0.0, 0.25, 0.5, 0.75};

  double background_extent = 3.0;
  double background_h = 0.05;
  int svd_report = 20;

  int speedup_repeats = 1;
  /// ROM runs are cheap, so they are repeated more often for stable minima.
  int rom_repeats = 10;

  static fom::Parameters default_mu();

  int steps() const;
  std::filesystem::path model_dir() const { return model.empty() ? out / "model" : model; }
  offline::TrainingConfig training(double eps_rb, double eps_ei) const;
  /// Test parameters drawn uniformly from the domain with the recorded seed.
  std::vector<fom::Parameters> test_parameters() const;

  /// Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError when the settings are inconsistent.
  void validate() const;
  /// key=value lines accepted by `set`, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Parses key=value lines. Blank lines and lines starting with '#' are
/// ignored; surrounding whitespace is trimmed.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& is);
void apply_config_file(StudyConfig& config, const std::filesystem::path& path);
void write_config(std::ostream& os, const StudyConfig& config);

}  // namespace osmorom::harness
