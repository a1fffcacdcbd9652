#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "surfpart/error.hpp"
#include "surfpart/kernels.hpp"

namespace surfpart::kernels {

namespace detail {
bool element(const TriangulatedSurface& mesh, std::size_t t, double* mass, double* stiff, double& area);
}

namespace omp {

namespace {
int resolve(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }
}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, int threads) {
  const auto rp = a.row_ptr();
  const auto ci = a.cols();
  const auto va = a.values();
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k) s += va[k] * x[ci[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y, int threads) {
  const std::size_t n = x.size();
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t last = std::min(n, first + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void ode_step(std::span<const std::span<double>> components, double factor, int threads) {
  const std::size_t m = components.size();
  if (m == 0) return;
  if (m > kMaxComponents) throw SizeError("at most 32 components are supported");
  const auto n = static_cast<std::ptrdiff_t>(components[0].size());
#pragma omp parallel for schedule(static) num_threads(resolve(threads))
  for (std::ptrdiff_t z = 0; z < n; ++z) {
    std::array<double, kMaxComponents> sq;
    for (std::size_t i = 0; i < m; ++i) sq[i] = components[i][z] * components[i][z];
    const double s = sorted_square_sum(sq.data(), m);
    for (std::size_t i = 0; i < m; ++i) components[i][z] *= std::exp(-factor * (s - sq[i]));
  }
}

ElementMatrices element_matrices(const TriangulatedSurface& mesh, int threads) {
  const auto nt = static_cast<std::ptrdiff_t>(mesh.num_triangles());
  ElementMatrices em;
  em.mass.resize(9 * static_cast<std::size_t>(nt));
  em.stiffness.resize(9 * static_cast<std::size_t>(nt));
  em.area.resize(static_cast<std::size_t>(nt));
  std::ptrdiff_t bad = std::numeric_limits<std::ptrdiff_t>::max();
#pragma omp parallel for schedule(static) num_threads(resolve(threads)) reduction(min : bad)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    const auto u = static_cast<std::size_t>(t);
    if (!detail::element(mesh, u, &em.mass[9 * u], &em.stiffness[9 * u], em.area[u]))
      bad = std::min(bad, t);
  }
  if (bad != std::numeric_limits<std::ptrdiff_t>::max()) {
    const auto t = static_cast<std::size_t>(bad);
    throw AssemblyError(t, "degenerate triangle " + std::to_string(t) + " (non-positive area)");
  }
  return em;
}

}  // namespace omp
}  // namespace surfpart::kernels
