#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "surfpart/error.hpp"
#include "surfpart/kernels.hpp"

namespace surfpart::kernels {

double sorted_square_sum(const double* squares, std::size_t m) {
  std::array<double, kMaxComponents> buf;
  std::copy(squares, squares + m, buf.begin());
  std::sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m));
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += buf[i];
  return s;
}

namespace detail {

// Shared by both execution paths so the element values are identical.
bool element(const TriangulatedSurface& mesh, std::size_t t, double* mass, double* stiff, double& area) {
  const auto& v = mesh.vertices();
  const auto& tri = mesh.triangles()[t];
  const Vec3& x0 = v[tri[0]];
  const Vec3& x1 = v[tri[1]];
  const Vec3& x2 = v[tri[2]];
  area = 0.5 * norm(cross(x1 - x0, x2 - x0));
  if (!(area > 0.0)) return false;
  // Edge opposite each vertex.
  const std::array<Vec3, 3> e = {x2 - x1, x0 - x2, x1 - x0};
  const double m_off = area / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mass[3 * i + j] = i == j ? 2.0 * m_off : m_off;
      stiff[3 * i + j] = dot(e[i], e[j]) / (4.0 * area);
    }
  return true;
}

}  // namespace detail

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto rp = a.row_ptr();
  const auto ci = a.cols();
  const auto va = a.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k) s += va[k] * x[ci[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t b = 0; b < n; b += kReductionBlock) {
    const std::size_t e = std::min(n, b + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i] * y[i];
    total += s;
  }
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void ode_step(std::span<const std::span<double>> components, double factor) {
  const std::size_t m = components.size();
  if (m == 0) return;
  if (m > kMaxComponents) throw SizeError("at most 32 components are supported");
  const std::size_t n = components[0].size();
  std::array<double, kMaxComponents> sq;
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t i = 0; i < m; ++i) sq[i] = components[i][z] * components[i][z];
    const double s = sorted_square_sum(sq.data(), m);
    for (std::size_t i = 0; i < m; ++i) components[i][z] *= std::exp(-factor * (s - sq[i]));
  }
}

ElementMatrices element_matrices(const TriangulatedSurface& mesh) {
  const std::size_t nt = mesh.num_triangles();
  ElementMatrices em;
  em.mass.resize(9 * nt);
  em.stiffness.resize(9 * nt);
  em.area.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!detail::element(mesh, t, &em.mass[9 * t], &em.stiffness[9 * t], em.area[t]))
      throw AssemblyError(t, "degenerate triangle " + std::to_string(t) + " (non-positive area)");
  }
  return em;
}

}  // namespace serial
}  // namespace surfpart::kernels
