#pragma once

#include <functional>
#include <string>
#include <variant>

#include "surfpart/vec3.hpp"

namespace surfpart {

struct Sphere {
  double radius = 1.0;
};

// Major radius R (centre of tube), minor radius r (tube radius).
struct Torus {
  double major_radius = 0.8;
  double minor_radius = 0.2;
};

// Level set {Phi = 0}; the gradient must not vanish near the surface.
struct ImplicitSurface {
  std::string name;
  std::function<double(const Vec3&)> level;
  std::function<Vec3(const Vec3&)> gradient;
};

// Flat disk or circular sector in the x3 = 0 plane, apex at the origin,
// first straight edge along +x1. sector_angle == 2*pi means the full disk.
struct PlanarDisk {
  double radius = 1.0;
  double sector_angle = 6.283185307179586;
};

using SurfaceGeometry = std::variant<Sphere, Torus, ImplicitSurface, PlanarDisk>;

// Surface (D): Phi(x) = (x1 - x3^2)^2 + x2^2 + x3^2 - 1.
ImplicitSurface dziuk_surface();

// Throws GeometryError on invalid parameters (non-positive radii, r >= R,
// sector angle outside (0, 2pi]).
void validate(const SurfaceGeometry& geometry);

bool is_closed(const SurfaceGeometry& geometry);
bool is_full_disk(const PlanarDisk& disk);

// Signed level function of the geometry. Sphere and torus use the signed
// distance; the planar disk uses x3.
double level_value(const SurfaceGeometry& geometry, const Vec3& x);

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_steps = 100;
};

// Damped Newton x <- x - s Phi grad Phi / |grad Phi|^2, s halved whenever the
// residual grows. Returns false if |Phi| did not reach the tolerance.
bool newton_project(const ImplicitSurface& surface, Vec3& x, const NewtonOptions& options = {});

// Closest-point projection for sphere/torus, Newton for implicit surfaces,
// x3 <- 0 for the disk. Throws ProjectionError (vertex index `tag`) if Newton fails.
Vec3 project(const SurfaceGeometry& geometry, const Vec3& x, std::size_t tag = 0);

std::string describe(const SurfaceGeometry& geometry);

}  // namespace surfpart
