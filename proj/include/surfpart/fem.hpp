#pragma once

#include <functional>
#include <span>
#include <vector>

#include "surfpart/kernels.hpp"
#include "surfpart/mesh.hpp"
#include "surfpart/sparse.hpp"

namespace surfpart {

// One value per mesh vertex; a continuous piecewise-linear function.
struct NodalField {
  MeshId mesh = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

NodalField interpolate(const TriangulatedSurface& mesh, const std::function<double(const Vec3&)>& f);

// Consistent P1 mass matrix, element contribution (area/12) [[2,1,1],[1,2,1],[1,1,2]].
CsrMatrix assemble_mass(const TriangulatedSurface& mesh, Execution exec = Execution::serial);
// P1 stiffness from tangential gradients on each flat triangle.
CsrMatrix assemble_stiffness(const TriangulatedSurface& mesh, Execution exec = Execution::serial);

struct FemOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
};
FemOperators assemble_operators(const TriangulatedSurface& mesh, Execution exec = Execution::serial);

// Row sums of the consistent mass matrix (area/3 per incident triangle).
std::vector<double> lumped_mass(const TriangulatedSurface& mesh);

double quadratic_form(const CsrMatrix& a, std::span<const double> x);
double l2_norm(const NodalField& f, const CsrMatrix& mass);
// f^T A f, the squared H1 semi-norm.
double dirichlet_energy(const NodalField& f, const CsrMatrix& stiffness);

// Six-point rule exact for polynomials of degree 4 on a triangle.
struct QuadraturePoint {
  double b0, b1, b2;  // barycentric coordinates
  double weight;      // fraction of the triangle area
};
const std::array<QuadraturePoint, 6>& degree4_rule();

// c_i = int u_i^2 (sum_{j != i} u_j^2) over the mesh, degree-4 quadrature.
std::vector<double> cross_integrals(const TriangulatedSurface& mesh,
                                    std::span<const std::span<const double>> components);

// S_eps = (1/eps^2) int sum_i sum_{j != i} u_i^2 u_j^2.
double penalty_energy(const TriangulatedSurface& mesh, std::span<const std::span<const double>> components,
                      double epsilon);
// Same integral with vertex (lumped) quadrature.
double penalty_energy_nodal(const TriangulatedSurface& mesh,
                            std::span<const std::span<const double>> components, double epsilon);

NodalField prolong(const NodalField& f, const ProlongationMap& map);

// Dirichlet rows/columns replaced by `diagonal` on the diagonal and zeros elsewhere.
CsrMatrix apply_dirichlet(const CsrMatrix& a, std::span<const std::uint8_t> mask, double diagonal);

}  // namespace surfpart
