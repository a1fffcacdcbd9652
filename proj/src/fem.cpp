#include "surfpart/fem.hpp"

#include <cmath>

#include "surfpart/error.hpp"

namespace surfpart {

namespace {

void scatter(const TriangulatedSurface& mesh, std::span<const double> local, CsrMatrix& a) {
  auto values = a.values();
  const auto& tris = mesh.triangles();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) values[a.find(tri[i], tri[j])] += local[9 * t + 3 * i + j];
  }
}

kernels::ElementMatrices elements(const TriangulatedSurface& mesh, Execution exec) {
  return exec == Execution::serial ? kernels::serial::element_matrices(mesh)
                                   : kernels::omp::element_matrices(mesh);
}

void check_size(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

NodalField interpolate(const TriangulatedSurface& mesh, const std::function<double(const Vec3&)>& f) {
  NodalField out{mesh.id(), std::vector<double>(mesh.num_vertices())};
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) out.values[i] = f(mesh.vertices()[i]);
  return out;
}

CsrMatrix assemble_mass(const TriangulatedSurface& mesh, Execution exec) {
  const auto em = elements(mesh, exec);
  CsrMatrix m = mesh_pattern(mesh);
  scatter(mesh, em.mass, m);
  return m;
}

CsrMatrix assemble_stiffness(const TriangulatedSurface& mesh, Execution exec) {
  const auto em = elements(mesh, exec);
  CsrMatrix a = mesh_pattern(mesh);
  scatter(mesh, em.stiffness, a);
  return a;
}

FemOperators assemble_operators(const TriangulatedSurface& mesh, Execution exec) {
  const auto em = elements(mesh, exec);
  FemOperators ops{mesh_pattern(mesh), mesh_pattern(mesh)};
  scatter(mesh, em.mass, ops.mass);
  scatter(mesh, em.stiffness, ops.stiffness);
  return ops;
}

std::vector<double> lumped_mass(const TriangulatedSurface& mesh) {
  std::vector<double> d(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.triangle_area(t) / 3.0;
    for (Index v : mesh.triangles()[t]) d[v] += a;
  }
  return d;
}

double quadratic_form(const CsrMatrix& a, std::span<const double> x) {
  check_size(a.size(), x.size());
  std::vector<double> y(x.size());
  kernels::serial::spmv(a, x, y);
  return kernels::serial::dot(x, y);
}

double l2_norm(const NodalField& f, const CsrMatrix& mass) {
  return std::sqrt(std::max(0.0, quadratic_form(mass, f.values)));
}

double dirichlet_energy(const NodalField& f, const CsrMatrix& stiffness) {
  return quadratic_form(stiffness, f.values);
}

const std::array<QuadraturePoint, 6>& degree4_rule() {
  static const std::array<QuadraturePoint, 6> rule = [] {
    const double s10 = std::sqrt(10.0);
    const double r = std::sqrt(38.0 - 44.0 * std::sqrt(2.0 / 5.0));
    const double a1 = (8.0 - s10 + r) / 18.0;
    const double a2 = (8.0 - s10 - r) / 18.0;
    const double q = std::sqrt(213125.0 - 53320.0 * s10);
    const double w1 = (620.0 + q) / 3720.0;
    const double w2 = (620.0 - q) / 3720.0;
    const double c1 = 1.0 - 2.0 * a1;
    const double c2 = 1.0 - 2.0 * a2;
    return std::array<QuadraturePoint, 6>{{{a1, a1, c1, w1},
                                           {a1, c1, a1, w1},
                                           {c1, a1, a1, w1},
                                           {a2, a2, c2, w2},
                                           {a2, c2, a2, w2},
                                           {c2, a2, a2, w2}}};
  }();
  return rule;
}

std::vector<double> cross_integrals(const TriangulatedSurface& mesh,
                                    std::span<const std::span<const double>> components) {
  const std::size_t m = components.size();
  for (const auto& c : components) check_size(c.size(), mesh.num_vertices());
  if (m > kernels::kMaxComponents) throw SizeError("at most 32 components are supported");
  std::vector<double> out(m, 0.0);
  const auto& rule = degree4_rule();
  std::array<double, kernels::kMaxComponents> sq{};
  std::array<double, kernels::kMaxComponents + 1> suffix{};
  std::vector<double> local(m);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = mesh.triangle_area(t);
    std::fill(local.begin(), local.end(), 0.0);
    for (const auto& q : rule) {
      for (std::size_t i = 0; i < m; ++i) {
        const auto& u = components[i];
        const double val = q.b0 * u[tri[0]] + q.b1 * u[tri[1]] + q.b2 * u[tri[2]];
        sq[i] = val * val;
      }
      suffix[m] = 0.0;
      for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] + sq[i];
      double prefix = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        local[i] += q.weight * sq[i] * (prefix + suffix[i + 1]);
        prefix += sq[i];
      }
    }
    for (std::size_t i = 0; i < m; ++i) out[i] += area * local[i];
  }
  return out;
}

double penalty_energy(const TriangulatedSurface& mesh, std::span<const std::span<const double>> components,
                      double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  double s = 0.0;
  for (double c : cross_integrals(mesh, components)) s += c;
  return s / (epsilon * epsilon);
}

double penalty_energy_nodal(const TriangulatedSurface& mesh,
                            std::span<const std::span<const double>> components, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto w = lumped_mass(mesh);
  const std::size_t m = components.size();
  double s = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double q = components[i][z] * components[i][z];
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) sum += q * components[j][z] * components[j][z];
    }
    s += w[z] * sum;
  }
  return s / (epsilon * epsilon);
}

NodalField prolong(const NodalField& f, const ProlongationMap& map) {
  if (f.mesh != map.parent) throw MeshMismatchError("field does not live on the prolongation's parent mesh");
  NodalField out{map.child, std::vector<double>(map.sources.size())};
  for (std::size_t i = 0; i < map.sources.size(); ++i) {
    const auto& s = map.sources[i];
    out.values[i] = s.is_copy() ? f.values.at(s.a) : 0.5 * (f.values.at(s.a) + f.values.at(s.b));
  }
  return out;
}

CsrMatrix apply_dirichlet(const CsrMatrix& a, std::span<const std::uint8_t> mask, double diagonal) {
  check_size(a.size(), mask.size());
  CsrMatrix out = a;
  auto v = out.values();
  const auto rp = out.row_ptr();
  const auto ci = out.cols();
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t j = ci[k];
      if (mask[i] || mask[j]) v[k] = (i == j) ? diagonal : 0.0;
    }
  return out;
}

}  // namespace surfpart
