#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "osmorom/fom/solver.hpp"
#include "osmorom/offline/model.hpp"

namespace osmorom::offline {

inline constexpr int kArchiveVersion = 1;

/// Directory archive: `manifest.txt` with key=value metadata and one
/// `<name>.bin` file per array (little-endian float64, column-major). The
/// manifest records every array's shape and SHA-256 digest.
class ArchiveWriter {
 public:
  ArchiveWriter(std::filesystem::path dir, std::string schema);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void meta(const std::string& key, int value);
  void array(const std::string& name, const Eigen::MatrixXd& values);
  /// Writes the manifest. Arrays are already on disk.
  void finish();

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> lines_;
};

class ArchiveReader {
 public:
  /// Throws FormatVersionMismatch if the manifest is missing or has another
  /// schema or version.
  ArchiveReader(std::filesystem::path dir, const std::string& schema);

  bool has(const std::string& key) const { return meta_.count(key) != 0; }
  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  bool has_array(const std::string& name) const { return arrays_.count(name) != 0; }
  /// Throws ChecksumMismatch on a missing, truncated or modified file.
  Eigen::MatrixXd array(const std::string& name) const;

 private:
  struct Entry {
    Eigen::Index rows = 0, cols = 0;
    std::string sha;
  };
  std::filesystem::path dir_;
  std::map<std::string, std::string> meta_;
  std::map<std::string, Entry> arrays_;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

void save_model(const std::filesystem::path& dir, const ReducedModel& model);
ReducedModel load_model(const std::filesystem::path& dir);

void save_trajectory(const std::filesystem::path& dir, const fom::Trajectory& trajectory);
fom::Trajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace osmorom::offline
