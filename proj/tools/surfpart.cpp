// Command-line driver: mesh | solve | study-eps | study-h | oracle | analyze.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "surfpart/commands.hpp"
#include "surfpart/config.hpp"
#include "surfpart/error.hpp"

namespace {

using surfpart::RunConfig;

// Values given on the command line; they override the config file, which
// overrides the per-command defaults.
struct Overrides {
  std::optional<std::string> surface, out, config;
  std::optional<std::size_t> m, max_vertices;
  std::optional<double> eps0, tau0, shrink, tau_shrink, tol, radius, major, minor, sector_degrees;
  std::optional<int> levels, level, workers, snapshot_every;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_steps;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "flat key = value configuration file");
    app->add_option("--surface", surface, "surface kind")
        ->check(CLI::IsMember({"sphere", "torus", "dziuk", "disk", "sector"}));
    app->add_option("--m", m, "number of components");
    app->add_option("--eps0", eps0, "initial epsilon");
    app->add_option("--tau0", tau0, "initial time step");
    app->add_option("--shrink", shrink, "epsilon factor per level");
    app->add_option("--tau-shrink", tau_shrink, "time step factor per refinement");
    app->add_option("--levels", levels, "continuation levels after the first");
    app->add_option("--level", level, "initial mesh refinement level");
    app->add_option("--max-vertices", max_vertices, "refine only while the mesh stays below this size");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--tol", tol, "stopping tolerance on the energy change");
    app->add_option("--max-steps", max_steps, "maximum steps per level");
    app->add_option("--workers", workers, "threads sharing the components");
    app->add_option("--out", out, "output directory ('-' writes nothing)");
    app->add_option("--radius", radius, "sphere or disk radius");
    app->add_option("--major", major, "torus major radius");
    app->add_option("--minor", minor, "torus minor radius");
    app->add_option("--sector-angle", sector_degrees, "sector opening in degrees");
    app->add_option("--snapshot-every", snapshot_every, "snapshot cadence in levels (0: last only)");
  }

  RunConfig resolve(RunConfig c) const {
    if (config) c = surfpart::load_config(*config);
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.surface, surface);
    set(c.out, out);
    set(c.m, m);
    set(c.max_vertices, max_vertices);
    set(c.eps0, eps0);
    set(c.tau0, tau0);
    set(c.shrink, shrink);
    set(c.tau_shrink, tau_shrink);
    set(c.stop_tol, tol);
    set(c.radius, radius);
    set(c.major_radius, major);
    set(c.minor_radius, minor);
    set(c.levels, levels);
    set(c.level, level);
    set(c.workers, workers);
    set(c.snapshot_every, snapshot_every);
    set(c.seed, seed);
    set(c.max_steps, max_steps);
    if (sector_degrees) c.sector_angle = *sector_degrees * std::numbers::pi / 180.0;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral partitions of surfaces by a penalised gradient flow"};
  app.require_subcommand(1);

  Overrides opts;
  std::string snapshot;
  auto* mesh = app.add_subcommand("mesh", "generate a surface mesh and write it as VTK");
  auto* solve = app.add_subcommand("solve", "run the continuation and write snapshots, trace and summary");
  auto* study_eps = app.add_subcommand("study-eps", "epsilon convergence against the Y-partition");
  auto* study_h = app.add_subcommand("study-h", "mesh convergence at fixed epsilon");
  auto* oracle = app.add_subcommand("oracle", "Dirichlet eigenvalue of the disk or a sector");
  auto* analyze = app.add_subcommand("analyze", "extract the partition from a snapshot");
  analyze->add_option("snapshot", snapshot, "snapshot VTK file")->required();
  for (auto* sub : {mesh, solve, study_eps, study_h, oracle, analyze}) opts.attach(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig defaults;
    if (study_eps->parsed()) {
      defaults.shrink = 0.5;
      defaults.level = 3;
      defaults.levels = 6;
    } else if (study_h->parsed()) {
      defaults.eps0 = 0.25;
      defaults.level = 2;
      defaults.levels = 3;
    } else if (oracle->parsed()) {
      defaults.surface = "disk";
      defaults.level = 2;
      defaults.levels = 3;
    }
    const RunConfig config = opts.resolve(defaults);

    if (mesh->parsed()) {
      surfpart::cmd_mesh(config, std::cout);
    } else if (solve->parsed()) {
      const auto out = surfpart::cmd_solve(config, std::cout);
      if (out.result.failure) return 2;
    } else if (study_eps->parsed()) {
      const auto out = surfpart::cmd_study_eps(config, std::cout);
      if (out.result.failure) return 2;
    } else if (study_h->parsed()) {
      surfpart::cmd_study_h(config, std::cout);
    } else if (oracle->parsed()) {
      surfpart::cmd_oracle(config, std::cout);
    } else if (analyze->parsed()) {
      surfpart::cmd_analyze(snapshot, config, std::cout);
    }
  } catch (const surfpart::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
