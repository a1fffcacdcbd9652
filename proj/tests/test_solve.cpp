#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "surfpart/error.hpp"
#include "surfpart/fem.hpp"
#include "surfpart/reference.hpp"
#include "surfpart/solve.hpp"
#include "surfpart/sparse.hpp"

using namespace surfpart;
constexpr double kPi = std::numbers::pi;

namespace {

CsrMatrix dense_to_csr(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> rp{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j] != 0.0 || i == j) {
        cols.push_back(static_cast<Index>(j));
        vals.push_back(a[i][j]);
      }
    rp.push_back(cols.size());
  }
  return CsrMatrix(n, rp, cols, vals, true);
}

std::vector<double> product(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.size());
  kernels::serial::spmv(a, x, y);
  return y;
}

double a_norm_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> exact) {
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = x[i] - exact[i];
  return std::sqrt(quadratic_form(a, e));
}

}  // namespace

TEST_CASE("identity system converges in one iteration") {
  const std::size_t n = 10;
  std::vector<std::vector<double>> id(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1.0;
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = 0.5 + static_cast<double>(i);
  const auto r = pcg_solve(dense_to_csr(id), b, std::vector<double>(n, 0.0), 1e-12, 10);
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 1);
  for (std::size_t i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("two by two system") {
  const auto a = dense_to_csr({{4.0, 1.0}, {1.0, 3.0}});
  const std::vector<double> b{1.0, 2.0};
  const auto r = pcg_solve(a, b, std::vector<double>{0.0, 0.0}, 1e-14, 10);
  const auto exact = oracle::dense_solve({{4.0, 1.0}, {1.0, 3.0}}, b);
  CHECK(r.report.converged);
  CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-13));
  CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-13));
  CHECK(exact[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("heat operator reproduces constants") {
  const auto mesh = generate_icosphere(3);
  const auto ops = assemble_operators(mesh);
  const double tau = 1e-3;
  const auto heat = ops.mass.combine(1.0 / tau, ops.stiffness, 1.0);
  auto rhs = product(ops.mass, std::vector<double>(mesh.num_vertices(), 1.0));
  for (auto& v : rhs) v /= tau;
  const auto r = pcg_solve(heat, rhs, std::vector<double>(mesh.num_vertices(), 0.0), 1e-12, 1000);
  CHECK(r.report.converged);
  for (double v : r.x) CHECK(std::abs(v - 1.0) < 1e-9);
}

TEST_CASE("random small SPD systems agree with dense elimination") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 12;
    std::vector<std::vector<double>> b(n, std::vector<double>(n)), a(n, std::vector<double>(n, 0.0));
    for (auto& row : b)
      for (auto& v : row) v = d(gen);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) a[i][j] += b[k][i] * b[k][j];
        if (i == j) a[i][j] += 0.5;
      }
    std::vector<double> rhs(n);
    for (auto& v : rhs) v = d(gen);
    const auto exact = oracle::dense_solve(a, rhs);
    const auto r = pcg_solve(dense_to_csr(a), rhs, std::vector<double>(n, 0.0), 1e-13, 500);
    CHECK(r.report.converged);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r.x[i] - exact[i]) < 1e-9 * (1.0 + std::abs(exact[i])));
  }
}

TEST_CASE("energy-norm error decreases monotonically") {
  const auto mesh = generate_icosphere(3);
  const auto ops = assemble_operators(mesh);
  const auto heat = ops.mass.combine(1.0 / 1e-2, ops.stiffness, 1.0);
  const auto exact = interpolate(mesh, [](const Vec3& x) { return std::sin(3.0 * x.x) + x.y * x.z; }).values;
  const auto rhs = product(heat, exact);
  std::vector<double> x(mesh.num_vertices(), 0.0);
  double previous = a_norm_error(heat, x, exact);
  const double floor = 1e-12 * previous;  // round-off level
  PcgWorkspace work;
  for (int iters = 1; iters <= 40; ++iters) {
    std::fill(x.begin(), x.end(), 0.0);
    PcgOptions o;
    o.rel_tol = 1e-30;
    o.max_iter = iters;
    const auto report = pcg_solve_into(heat, rhs, x, o, work);
    CHECK(report.iterations == iters);
    const double err = a_norm_error(heat, x, exact);
    CHECK(err <= previous * (1.0 + 1e-12) + floor);
    previous = err;
  }
}

TEST_CASE("converged solves meet the tolerance and non-convergence is reported") {
  const auto mesh = generate_icosphere(3);
  const auto ops = assemble_operators(mesh);
  const auto heat = ops.mass.combine(1.0 / 1e-3, ops.stiffness, 1.0);
  std::vector<double> b(mesh.num_vertices());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::cos(static_cast<double>(i));
  PcgWorkspace work;
  std::vector<double> x(b.size(), 0.0);
  PcgOptions o;
  o.rel_tol = 1e-10;
  o.record_history = true;
  const auto ok = pcg_solve_into(heat, b, x, o, work);
  CHECK(ok.converged);
  CHECK(ok.final_residual_norm <= 1e-10);
  CHECK(ok.residual_history.size() == static_cast<std::size_t>(ok.iterations));
  std::vector<double> ax(b.size());
  kernels::serial::spmv(heat, x, ax);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    rn += (b[i] - ax[i]) * (b[i] - ax[i]);
    bn += b[i] * b[i];
  }
  CHECK(std::sqrt(rn / bn) == doctest::Approx(ok.final_residual_norm).epsilon(1e-6));

  std::fill(x.begin(), x.end(), 0.0);
  o.max_iter = 2;
  const auto capped = pcg_solve_into(heat, b, x, o, work);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 2);

  const auto zero = pcg_solve(heat, std::vector<double>(b.size(), 0.0), std::vector<double>(b.size(), 0.0), 1e-10, 5);
  CHECK(zero.report.converged);
  for (double v : zero.x) CHECK(v == 0.0);
}

TEST_CASE("invalid diagonals and tolerances are rejected") {
  const auto a = dense_to_csr({{0.0, 1.0}, {1.0, 3.0}});
  CHECK_THROWS_AS(pcg_solve(a, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}, 1e-10, 10),
                  PreconditionerError);
  const auto spd = dense_to_csr({{2.0, 0.0}, {0.0, 3.0}});
  CHECK_THROWS_AS(pcg_solve(spd, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}, 0.0, 10), DomainError);
  CHECK_THROWS_AS(pcg_solve(spd, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}, 1.0, 10), DomainError);
  CHECK_THROWS_AS(pcg_solve(spd, std::vector<double>{1.0}, std::vector<double>{0.0, 0.0}, 1e-8, 10), DimensionError);
}

TEST_CASE("serial and parallel solves agree bitwise") {
  const auto mesh = generate_torus(1.0, 0.6, 24, 12);
  const auto ops = assemble_operators(mesh);
  const auto heat = ops.mass.combine(1e3, ops.stiffness, 1.0);
  std::vector<double> b(mesh.num_vertices());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.1 * static_cast<double>(i));
  PcgWorkspace w1, w2;
  std::vector<double> x1(b.size(), 0.0), x2(b.size(), 0.0);
  PcgOptions o;
  const auto r1 = pcg_solve_into(heat, b, x1, o, w1);
  o.exec = Execution::parallel;
  const auto r2 = pcg_solve_into(heat, b, x2, o, w2);
  CHECK(r1.iterations == r2.iterations);
  CHECK(x1 == x2);
}

TEST_CASE("disk eigenvalue converges to j01 squared") {
  std::vector<double> err;
  for (int l = 2; l <= 4; ++l) {
    const auto mesh = generate_disk(l, 1.0, 2.0 * kPi);
    const auto ops = assemble_operators(mesh);
    const auto pair = smallest_eigenpair(ops.stiffness, ops.mass, mesh.boundary_flags(), {}, mesh.id());
    CHECK(pair.value > 0.0);
    CHECK(pair.vector.mesh == mesh.id());
    // Rayleigh quotient of the returned vector equals the value.
    CHECK(quadratic_form(ops.stiffness, pair.vector.values) / quadratic_form(ops.mass, pair.vector.values) ==
          doctest::Approx(pair.value).epsilon(1e-8));
    CHECK(quadratic_form(ops.mass, pair.vector.values) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
      if (mesh.is_boundary(v)) CHECK(pair.vector.values[v] == 0.0);
    err.push_back(std::abs(pair.value - oracle::kJ01 * oracle::kJ01));
  }
  CHECK(err.back() / (oracle::kJ01 * oracle::kJ01) < 0.02);
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double rate = std::log2(err[i - 1] / err[i]);
    CHECK(rate > 1.7);
    CHECK(rate < 2.3);
  }
}

TEST_CASE("sector eigenvalues scale to the tabulated Bessel zeros") {
  struct Case {
    double angle, zero;
  };
  for (const auto c : {Case{2.0 * kPi / 3.0, oracle::kJ15_1}, Case{kPi / 2.0, oracle::kJ21}}) {
    const auto mesh = generate_disk(4, 1.0, c.angle);
    const auto ops = assemble_operators(mesh);
    const auto pair = smallest_eigenpair(ops.stiffness, ops.mass, mesh.boundary_flags());
    CHECK(std::abs(pair.value - c.zero * c.zero) / (c.zero * c.zero) < 0.02);
    CHECK(reference::sector_eigenvalue(c.angle) == doctest::Approx(c.zero * c.zero).epsilon(1e-12));
  }
  CHECK(reference::sector_eigenvalue(2.0 * kPi) == doctest::Approx(oracle::kJ01 * oracle::kJ01).epsilon(1e-12));
}

TEST_CASE("hemisphere eigenvalue approaches 2") {
  const auto mesh = generate_icosphere(4);
  const auto ops = assemble_operators(mesh);
  std::vector<std::uint8_t> mask(mesh.num_vertices());
  for (std::size_t v = 0; v < mask.size(); ++v) mask[v] = mesh.vertices()[v].z <= 1e-12;
  const auto pair = smallest_eigenpair(ops.stiffness, ops.mass, mask);
  CHECK(std::abs(pair.value - 2.0) / 2.0 < 0.05);
}

TEST_CASE("fully masked eigenproblem is a domain error") {
  const auto mesh = generate_disk(1, 1.0, 2.0 * kPi);
  const auto ops = assemble_operators(mesh);
  const std::vector<std::uint8_t> mask(mesh.num_vertices(), 1);
  CHECK_THROWS_AS(smallest_eigenpair(ops.stiffness, ops.mass, mask), DomainError);
}
