#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "surfpart/mesh.hpp"
#include "surfpart/segregation.hpp"

namespace surfpart {

// Every parameter of a run; stored as flat "key = value" text.
struct RunConfig {
  std::string surface = "sphere";  // sphere | torus | dziuk | disk | sector
  double radius = 1.0;
  double major_radius = 1.0;
  double minor_radius = 0.6;
  double sector_angle = 2.0 * std::numbers::pi / 3.0;  // sector only
  int level = 2;                                        // initial refinement level
  int torus_major = 32;                                 // torus grid before refinement
  int torus_minor = 16;

  std::size_t m = 3;
  double eps0 = 0.5;
  double tau0 = 8e-4;
  double shrink = 1.0 / std::numbers::sqrt2;      // epsilon factor per level
  double tau_shrink = 1.0 / std::numbers::sqrt2;  // tau factor per refinement
  int levels = 6;
  std::size_t max_vertices = 50000;
  std::uint64_t seed = 1;
  double stop_tol = 1e-6;
  double check_time = 0.1;
  std::int64_t max_steps = 2'000'000;
  double solver_tol = 1e-10;
  int max_solver_iter = 20000;
  int workers = 1;
  std::string out = "out";
  int snapshot_every = 1;  // write a snapshot every k levels; 0 keeps only the last

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError on violated invariants.
void validate(const RunConfig& config);

// One "key = value" per line, '#' starts a comment. Unknown keys and
// malformed values throw ConfigError naming the line.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);
RunConfig load_config(const std::string& path);

SurfaceGeometry make_geometry(const RunConfig& config);
TriangulatedSurface make_mesh(const RunConfig& config);
ContinuationSchedule make_schedule(const RunConfig& config);
StepOptions make_step_options(const RunConfig& config);

}  // namespace surfpart
