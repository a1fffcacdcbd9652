#include "surfpart/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#include "surfpart/error.hpp"
#include "surfpart/io.hpp"

namespace surfpart {

namespace {

template <class T>
bool parse_value(const std::string& s, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = s;
    return true;
  } else {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
  }
}

template <class T>
std::string print_value(const T& v) {
  if constexpr (std::is_same_v<T, std::string>)
    return v;
  else if constexpr (std::is_same_v<T, double>)
    return format_double(v);
  else
    return std::to_string(v);
}

struct Field {
  std::function<bool(RunConfig&, const std::string&)> parse;
  std::function<std::string(const RunConfig&)> print;

  template <class T>
  Field(T RunConfig::*member)
      : parse([member](RunConfig& c, const std::string& s) { return parse_value(s, c.*member); }),
        print([member](const RunConfig& c) { return print_value(c.*member); }) {}
};

// Serialization order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"surface", &RunConfig::surface},
      {"radius", &RunConfig::radius},
      {"major_radius", &RunConfig::major_radius},
      {"minor_radius", &RunConfig::minor_radius},
      {"sector_angle", &RunConfig::sector_angle},
      {"level", &RunConfig::level},
      {"torus_major", &RunConfig::torus_major},
      {"torus_minor", &RunConfig::torus_minor},
      {"m", &RunConfig::m},
      {"eps0", &RunConfig::eps0},
      {"tau0", &RunConfig::tau0},
      {"shrink", &RunConfig::shrink},
      {"tau_shrink", &RunConfig::tau_shrink},
      {"levels", &RunConfig::levels},
      {"max_vertices", &RunConfig::max_vertices},
      {"seed", &RunConfig::seed},
      {"stop_tol", &RunConfig::stop_tol},
      {"check_time", &RunConfig::check_time},
      {"max_steps", &RunConfig::max_steps},
      {"solver_tol", &RunConfig::solver_tol},
      {"max_solver_iter", &RunConfig::max_solver_iter},
      {"workers", &RunConfig::workers},
      {"out", &RunConfig::out},
      {"snapshot_every", &RunConfig::snapshot_every},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (c.surface != "sphere" && c.surface != "torus" && c.surface != "dziuk" && c.surface != "disk" &&
      c.surface != "sector")
    fail("unknown surface '" + c.surface + "'");
  if (c.m < 2) fail("m must be at least 2");
  if (c.m > kernels::kMaxComponents) fail("m must not exceed 32");
  if (!(c.eps0 > 0.0)) fail("eps0 must be positive");
  if (!(c.tau0 > 0.0)) fail("tau0 must be positive");
  if (!(c.shrink > 0.0 && c.shrink < 1.0)) fail("shrink must lie in (0, 1)");
  if (!(c.tau_shrink > 0.0 && c.tau_shrink <= 1.0)) fail("tau_shrink must lie in (0, 1]");
  if (c.levels < 0) fail("levels must be non-negative");
  if (c.level < 0 || c.level > kMaxLevel) fail("level must lie in [0, 10]");
  if (c.torus_major < 3 || c.torus_minor < 3) fail("torus grid needs at least 3 cells per direction");
  if (!(c.stop_tol > 0.0)) fail("stop_tol must be positive");
  if (!(c.check_time > 0.0)) fail("check_time must be positive");
  if (c.max_steps <= 0) fail("max_steps must be positive");
  if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0)) fail("solver_tol must lie in (0, 1)");
  if (c.max_solver_iter <= 0) fail("max_solver_iter must be positive");
  if (c.workers < 1) fail("workers must be at least 1");
  if (c.snapshot_every < 0) fail("snapshot_every must be non-negative");
  if (c.out.empty()) fail("out must name a directory");
  validate(make_geometry(c));
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    auto fail = [&](const std::string& what) { throw ConfigError("line " + std::to_string(line) + ": " + what); };
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    bool known = false;
    for (const auto& [name, field] : fields()) {
      if (name != key) continue;
      known = true;
      if (!field.parse(c, value)) fail("malformed value for " + key);
    }
    if (!known) fail("unknown key '" + key + "'");
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  for (const auto& [name, field] : fields()) os << name << " = " << field.print(c) << '\n';
  return os.str();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SurfaceGeometry make_geometry(const RunConfig& c) {
  if (c.surface == "sphere") return Sphere{c.radius};
  if (c.surface == "torus") return Torus{c.major_radius, c.minor_radius};
  if (c.surface == "dziuk") return dziuk_surface();
  if (c.surface == "disk") return PlanarDisk{c.radius, 2.0 * std::numbers::pi};
  if (c.surface == "sector") return PlanarDisk{c.radius, c.sector_angle};
  throw ConfigError("unknown surface '" + c.surface + "'");
}

TriangulatedSurface make_mesh(const RunConfig& c) {
  if (c.surface == "sphere") return generate_icosphere(c.level, c.radius);
  if (c.surface == "dziuk") return generate_implicit(generate_icosphere(c.level), dziuk_surface());
  if (c.surface == "torus") {
    auto mesh = generate_torus(c.major_radius, c.minor_radius, c.torus_major, c.torus_minor);
    for (int l = 0; l < c.level; ++l) mesh = refine(mesh).mesh;
    return mesh;
  }
  if (c.surface == "disk") return generate_disk(c.level, c.radius, 2.0 * std::numbers::pi);
  if (c.surface == "sector") return generate_disk(c.level, c.radius, c.sector_angle);
  throw ConfigError("unknown surface '" + c.surface + "'");
}

ContinuationSchedule make_schedule(const RunConfig& c) {
  ContinuationSchedule s;
  s.eps0 = c.eps0;
  s.tau0 = c.tau0;
  s.eps_factor = c.shrink;
  s.tau_factor = c.tau_shrink;
  s.levels = c.levels;
  s.max_vertices = c.max_vertices;
  s.stage.stop_tol = c.stop_tol;
  s.stage.check_time = c.check_time;
  s.stage.max_steps = c.max_steps;
  return s;
}

StepOptions make_step_options(const RunConfig& c) {
  StepOptions o;
  o.workers = c.workers;
  o.solver_tol = c.solver_tol;
  o.max_solver_iter = c.max_solver_iter;
  return o;
}

}  // namespace surfpart
