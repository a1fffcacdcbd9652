#include "surfpart/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "surfpart/error.hpp"
#include "surfpart/fem.hpp"

namespace surfpart::reference {

double y_partition_mode(std::size_t i, const Vec3& x) {
  const double r = norm(x);
  if (!(r > 0.0)) return 0.0;
  double phi = std::atan2(x.y, x.x) - 2.0 * std::numbers::pi * static_cast<double>(i) / 3.0;
  phi = std::fmod(phi, 2.0 * std::numbers::pi);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi > 2.0 * std::numbers::pi / 3.0) return 0.0;
  const double sin_theta = std::sqrt(std::max(0.0, x.x * x.x + x.y * x.y)) / r;
  return std::sin(1.5 * phi) * std::pow(sin_theta, 1.5);
}

ComponentEnsemble y_partition(const TriangulatedSurface& mesh, double epsilon, double tau) {
  ComponentEnsemble e;
  e.mesh = mesh.id();
  e.epsilon = epsilon;
  e.tau = tau;
  const auto mass = assemble_mass(mesh);
  for (std::size_t i = 0; i < 3; ++i) {
    auto f = interpolate(mesh, [i](const Vec3& x) { return y_partition_mode(i, x); });
    const double len = l2_norm(f, mass);
    for (double& v : f.values) v /= len;
    e.components.push_back(std::move(f.values));
  }
  return e;
}

double bessel_zero(double nu, int k) {
  if (k < 1 || nu < 0.0) throw DomainError("bessel_zero needs nu >= 0 and k >= 1");
  auto j = [nu](double x) { return std::cyl_bessel_j(nu, x); };
  // Scan for sign changes on a fine grid, then bisect.
  const double dx = 0.05;
  double a = 1e-6, fa = j(a);
  int found = 0;
  for (double b = a + dx;; b += dx) {
    const double fb = j(b);
    if ((fa > 0.0) != (fb > 0.0)) {
      if (++found == k) {
        double lo = a, hi = b, flo = fa;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi), fm = j(mid);
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
    fa = fb;
  }
}

double sector_eigenvalue(double angle) {
  if (!(angle > 0.0) || angle > 2.0 * std::numbers::pi + 1e-12) throw DomainError("sector angle must lie in (0, 2pi]");
  const bool full = std::abs(angle - 2.0 * std::numbers::pi) < 1e-12;
  const double z = bessel_zero(full ? 0.0 : std::numbers::pi / angle, 1);
  return z * z;
}

}  // namespace surfpart::reference
