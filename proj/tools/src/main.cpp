// osmorom command line driver.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "osmorom/errors.hpp"
#include "osmorom/harness/studies.hpp"

namespace {

using namespace osmorom;
using namespace osmorom::harness;

constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

// Flag name and the config key it overrides.
const std::vector<std::pair<std::string, std::string>> kValueFlags = {
    {"--eps-rb", "eps_rb"}, {"--eps-ei", "eps_ei"},         {"--mesh-h", "mesh_h"},
    {"--dt", "dt"},         {"--t-final", "t_final"},       {"--train-grid", "train_grid"},
    {"--test-count", "test_count"}, {"--seed", "seed"},     {"--out", "out"},
};

struct Leaf {
  StudyKind kind;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
  bool non_conservative = false;
  std::vector<std::string> extra;
};

void add_options(Leaf& leaf) {
  CLI::App* a = leaf.app;
  a->add_option("--config", leaf.config_file, "key=value config file")->check(CLI::ExistingFile);
  for (const auto& [flag, key] : kValueFlags) a->add_option(flag, leaf.values[key], "overrides '" + key + "'");
  a->add_flag("--non-conservative", leaf.non_conservative, "use the interpolated mass matrix for the concentration");
  a->add_option("--set", leaf.extra, "any other config key as key=value (repeatable)");
}

StudyConfig resolve(const Leaf& leaf) {
  StudyConfig c;
  c.kind = leaf.kind;
  if (!leaf.config_file.empty()) apply_config_file(c, leaf.config_file);
  for (const auto& [flag, key] : kValueFlags)
    if (leaf.app->count(flag) > 0) c.set(key, leaf.values.at(key));
  if (leaf.non_conservative) c.non_conservative = true;
  for (const auto& kv : leaf.extra) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void run(const StudyConfig& c) {
  const StudyContext ctx(c);
  std::cout << "mesh: " << ctx.disc->scalar_dofs() << " scalar dofs, sha256 " << ctx.mesh_hash << "\n";
  switch (c.kind) {
    case StudyKind::fom: {
      const FomSummary s = run_fom(ctx);
      std::cout << "states " << s.trajectory.states.size() << ", mass drift " << fmt(s.mass_drift) << ", final variance "
                << fmt(s.variance.back()) << ", wall " << fmt(s.trajectory.wall_time) << " s\n";
      break;
    }
    case StudyKind::offline: {
      const OfflineResult r = run_offline(ctx);
      std::cout << "eps_rb     eps_ei     k_bnd k_def k_conc  M1..M7\n";
      for (const auto& s : r.sizes) {
        std::printf("%-10s %-10s %5d %5d %6d ", fmt(s.eps_rb).c_str(), fmt(s.eps_ei).c_str(), s.k_bnd, s.k_def, s.k_conc);
        for (int m : s.m) std::printf(" %d", m);
        std::printf("\n");
      }
      std::cout << "model saved to " << c.model_dir().string() << "\n";
      break;
    }
    case StudyKind::rom: {
      const RomSummary s = run_rom(ctx);
      const double m0 = s.mass.front();
      double drift = 0.0;
      for (double m : s.mass) drift = std::max(drift, std::abs(m - m0) / m0);
      std::cout << "states " << s.trajectory.states.size() << ", mass drift " << fmt(drift) << ", loop "
                << fmt(s.trajectory.wall_time) << " s\n";
      break;
    }
    case StudyKind::error_surface: {
      for (const auto& cell : run_error_surface(ctx).cells)
        std::cout << "eps_rb " << fmt(cell.eps_rb) << " eps_ei " << fmt(cell.eps_ei) << ": err_u " << fmt(cell.max_err_u)
                  << " err_psi " << fmt(cell.max_err_psi) << " mass " << fmt(cell.max_mass_err) << " failures "
                  << cell.failures << "\n";
      break;
    }
    case StudyKind::conservation: {
      for (const auto& cell : run_conservation(ctx).cells)
        std::cout << "eps_rb " << fmt(cell.eps_rb) << " eps_ei " << fmt(cell.eps_ei) << " "
                  << (cell.conservative ? "conservative    " : "non-conservative") << " mass " << fmt(cell.max_mass_err)
                  << " failures " << cell.failures << "\n";
      break;
    }
    case StudyKind::speedup: {
      for (const auto& cell : run_speedup(ctx).cells)
        std::cout << "eps_rb " << fmt(cell.eps_rb) << " eps_ei " << fmt(cell.eps_ei) << ": speedup conservative "
                  << fmt(cell.median_speedup_conservative) << " non-conservative " << fmt(cell.median_speedup_plain)
                  << "\n";
      break;
    }
    case StudyKind::svd_compare: {
      const SvdComparison s = run_svd_compare(ctx);
      const Eigen::Index k = std::min<Eigen::Index>(c.svd_report, s.lagrangian_u.size()) - 1;
      std::cout << "sigma_" << k + 1 << "/sigma_1: lagrangian u " << fmt(s.lagrangian_u[k] / s.lagrangian_u[0])
                << ", lagrangian psi " << fmt(s.lagrangian_psi[k] / s.lagrangian_psi[0]) << ", eulerian u "
                << fmt(s.eulerian_u[k] / s.eulerian_u[0]) << "\n";
      break;
    }
    case StudyKind::variance: {
      const VarianceSweep s = run_variance_sweep(ctx);
      int failed = 0;
      for (const auto& r : s.rows) failed += r.ok ? 0 : 1;
      std::cout << s.rows.size() << " parameter cells, " << failed << " failed\n";
      break;
    }
  }
  std::cout << "outputs in " << c.out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced order modelling of osmotic cell swelling"};
  app.require_subcommand(1);
  std::vector<Leaf> leaves;
  leaves.reserve(8);
  auto add_leaf = [&leaves](StudyKind kind, CLI::App* sub) {
    Leaf& l = leaves.emplace_back();
    l.kind = kind;
    l.app = sub;
  };
  add_leaf(StudyKind::fom, app.add_subcommand("fom", "run the full-order model for one parameter"));
  add_leaf(StudyKind::offline, app.add_subcommand("offline", "training campaign, POD, EIM and projection"));
  add_leaf(StudyKind::rom, app.add_subcommand("rom", "run a saved reduced model for one parameter"));
  CLI::App* study = app.add_subcommand("study", "parameter studies");
  study->require_subcommand(1);
  add_leaf(StudyKind::error_surface, study->add_subcommand("error-surface", "errors over the tolerance grid"));
  add_leaf(StudyKind::conservation, study->add_subcommand("conservation", "mass conservation, both modes"));
  add_leaf(StudyKind::speedup, study->add_subcommand("speedup", "median online speedup"));
  add_leaf(StudyKind::svd_compare, study->add_subcommand("svd-compare", "Lagrangian vs Eulerian singular values"));
  add_leaf(StudyKind::variance, study->add_subcommand("variance", "variance over a (delta1, delta2) grid"));
  leaves.back().app->alias("variance-sweep");
  for (auto& l : leaves) add_options(l);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& l : leaves)
      if (l.app->parsed()) run(resolve(l));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
