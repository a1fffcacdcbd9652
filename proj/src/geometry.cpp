#include "surfpart/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "surfpart/error.hpp"

namespace surfpart {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ImplicitSurface dziuk_surface() {
  ImplicitSurface s;
  s.name = "dziuk";
  s.level = [](const Vec3& x) {
    const double a = x.x - x.z * x.z;
    return a * a + x.y * x.y + x.z * x.z - 1.0;
  };
  s.gradient = [](const Vec3& x) {
    const double a = x.x - x.z * x.z;
    return Vec3{2.0 * a, 2.0 * x.y, -4.0 * a * x.z + 2.0 * x.z};
  };
  return s;
}

void validate(const SurfaceGeometry& geometry) {
  std::visit(Overloaded{
                 [](const Sphere& s) {
                   if (!(s.radius > 0.0)) throw GeometryError("sphere radius must be positive");
                 },
                 [](const Torus& t) {
                   if (!(t.minor_radius > 0.0) || !(t.major_radius > 0.0))
                     throw GeometryError("torus radii must be positive");
                   if (!(t.minor_radius < t.major_radius))
                     throw GeometryError("torus requires minor radius < major radius");
                 },
                 [](const ImplicitSurface& s) {
                   if (!s.level || !s.gradient)
                     throw GeometryError("implicit surface needs a level function and gradient");
                 },
                 [](const PlanarDisk& d) {
                   if (!(d.radius > 0.0)) throw GeometryError("disk radius must be positive");
                   if (!(d.sector_angle > 0.0) || d.sector_angle > 2.0 * std::numbers::pi + 1e-12)
                     throw GeometryError("sector angle must lie in (0, 2pi]");
                 },
             },
             geometry);
}

bool is_closed(const SurfaceGeometry& geometry) {
  return !std::holds_alternative<PlanarDisk>(geometry);
}

bool is_full_disk(const PlanarDisk& disk) {
  return std::abs(disk.sector_angle - 2.0 * std::numbers::pi) < 1e-12;
}

double level_value(const SurfaceGeometry& geometry, const Vec3& x) {
  return std::visit(Overloaded{
                        [&](const Sphere& s) { return norm(x) - s.radius; },
                        [&](const Torus& t) {
                          const double rho = std::hypot(x.x, x.y);
                          return std::hypot(rho - t.major_radius, x.z) - t.minor_radius;
                        },
                        [&](const ImplicitSurface& s) { return s.level(x); },
                        [&](const PlanarDisk&) { return x.z; },
                    },
                    geometry);
}

bool newton_project(const ImplicitSurface& surface, Vec3& x, const NewtonOptions& options) {
  double f = surface.level(x);
  for (int step = 0; step < options.max_steps; ++step) {
    if (std::abs(f) <= options.tolerance) return true;
    const Vec3 g = surface.gradient(x);
    const double gg = dot(g, g);
    if (!(gg > 0.0)) return false;
    const Vec3 dx = g * (f / gg);
    double damping = 1.0;
    Vec3 trial = x - dx;
    double ft = surface.level(trial);
    while (std::abs(ft) > std::abs(f) && damping > 1e-8) {
      damping *= 0.5;
      trial = x - damping * dx;
      ft = surface.level(trial);
    }
    x = trial;
    f = ft;
  }
  return std::abs(f) <= options.tolerance;
}

Vec3 project(const SurfaceGeometry& geometry, const Vec3& x, std::size_t tag) {
  return std::visit(Overloaded{
                        [&](const Sphere& s) { return x * (s.radius / norm(x)); },
                        [&](const Torus& t) {
                          const double rho = std::hypot(x.x, x.y);
                          if (rho == 0.0) throw ProjectionError(tag, "point on torus axis");
                          const Vec3 centre{t.major_radius * x.x / rho, t.major_radius * x.y / rho, 0.0};
                          const Vec3 d = x - centre;
                          return centre + d * (t.minor_radius / norm(d));
                        },
                        [&](const ImplicitSurface& s) {
                          Vec3 y = x;
                          if (!newton_project(s, y)) {
                            std::ostringstream os;
                            os << "Newton projection onto " << s.name << " failed for vertex " << tag;
                            throw ProjectionError(tag, os.str());
                          }
                          return y;
                        },
                        [&](const PlanarDisk&) { return Vec3{x.x, x.y, 0.0}; },
                    },
                    geometry);
}

std::string describe(const SurfaceGeometry& geometry) {
  std::ostringstream os;
  os.precision(6);
  std::visit(Overloaded{
                 [&](const Sphere& s) { os << "sphere radius=" << s.radius; },
                 [&](const Torus& t) {
                   os << "torus major=" << t.major_radius << " minor=" << t.minor_radius;
                 },
                 [&](const ImplicitSurface& s) { os << "implicit name=" << s.name; },
                 [&](const PlanarDisk& d) {
                   os << "disk radius=" << d.radius << " angle=" << d.sector_angle;
                 },
             },
             geometry);
  return os.str();
}

}  // namespace surfpart
