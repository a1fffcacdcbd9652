#pragma once

#include <cstddef>

#include "surfpart/mesh.hpp"
#include "surfpart/segregation.hpp"

namespace surfpart::reference {

// Optimal 3-partition of the unit sphere: three lunes of opening 2pi/3
// meeting at the poles. On the lune starting at longitude phi0 the first
// eigenfunction is sin(3 (phi - phi0) / 2) sin(theta)^(3/2).
inline constexpr double kYEigenvalue = 15.0 / 4.0;
inline constexpr double kYEnergy = 45.0 / 4.0;

// Unnormalised eigenfunction of lune i (of 3) at x, zero outside the lune.
double y_partition_mode(std::size_t i, const Vec3& x);

// The three lune modes interpolated on `mesh` and normalised in the mesh
// L2 norm.
ComponentEnsemble y_partition(const TriangulatedSurface& mesh, double epsilon = 0.5, double tau = 8e-4);

// k-th positive zero of the Bessel function J_nu.
double bessel_zero(double nu, int k = 1);

// First Dirichlet eigenvalue of the unit disk sector with opening angle
// `angle` (2 pi for the full disk): j_{pi/angle,1}^2, or j_{0,1}^2.
double sector_eigenvalue(double angle);

}  // namespace surfpart::reference
