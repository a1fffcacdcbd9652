#include "surfpart/solve.hpp"

#include <algorithm>
#include <cmath>

#include "surfpart/error.hpp"

namespace surfpart {

namespace {

double norm2(Execution exec, std::span<const double> v) { return std::sqrt(kernels::dot(exec, v, v)); }

}  // namespace

SolveReport pcg_solve_into(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                           const PcgOptions& options, PcgWorkspace& w) {
  const std::size_t n = a.size();
  if (rhs.size() != n || x.size() != n) throw DimensionError("pcg: dimension mismatch");
  const Execution exec = options.exec;
  SolveReport report;

  w.inv_diag.resize(n);
  const auto rp = a.row_ptr();
  const auto ci = a.cols();
  const auto va = a.values();
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
      if (ci[k] == i) d = va[k];
    if (!(d > 0.0)) throw PreconditionerError("pcg: non-positive diagonal entry in row " + std::to_string(i));
    w.inv_diag[i] = 1.0 / d;
  }

  const double bnorm = norm2(exec, rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }
  const double target = options.rel_tol * bnorm;

  w.r.resize(n);
  w.z.resize(n);
  w.p.resize(n);
  w.q.resize(n);

  // r = b - A x, recomputed from scratch on (re)start.
  auto true_residual = [&] {
    kernels::spmv(exec, a, x, w.r);
    for (std::size_t i = 0; i < n; ++i) w.r[i] = rhs[i] - w.r[i];
    return norm2(exec, w.r);
  };

  double rnorm = true_residual();
  while (true) {
    if (rnorm <= target) {
      report.converged = true;
      break;
    }
    if (report.iterations >= options.max_iter) break;

    for (std::size_t i = 0; i < n; ++i) w.z[i] = w.inv_diag[i] * w.r[i];
    std::copy(w.z.begin(), w.z.end(), w.p.begin());
    double rz = kernels::dot(exec, w.r, w.z);

    while (report.iterations < options.max_iter) {
      kernels::spmv(exec, a, w.p, w.q);
      const double pq = kernels::dot(exec, w.p, w.q);
      if (!(pq > 0.0)) throw SolverError("pcg: matrix is not positive definite");
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * w.p[i];
        w.r[i] -= alpha * w.q[i];
      }
      ++report.iterations;
      rnorm = norm2(exec, w.r);
      if (options.record_history) report.residual_history.push_back(rnorm / bnorm);
      if (rnorm <= target) break;
      for (std::size_t i = 0; i < n; ++i) w.z[i] = w.inv_diag[i] * w.r[i];
      const double rz_new = kernels::dot(exec, w.r, w.z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) w.p[i] = w.z[i] + beta * w.p[i];
    }
    // Guard against drift of the recursive residual.
    rnorm = true_residual();
    if (rnorm <= target) {
      report.converged = true;
      break;
    }
  }
  report.final_residual_norm = rnorm / bnorm;
  return report;
}

PcgResult pcg_solve(const CsrMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                    double rel_tol, int max_iter) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("pcg: relative tolerance must lie in (0, 1)");
  PcgResult out;
  out.x.assign(x0.begin(), x0.end());
  PcgWorkspace work;
  PcgOptions opt;
  opt.rel_tol = rel_tol;
  opt.max_iter = max_iter;
  out.report = pcg_solve_into(a, rhs, out.x, opt, work);
  return out;
}

Eigenpair smallest_eigenpair(const CsrMatrix& stiffness, const CsrMatrix& mass,
                             std::span<const std::uint8_t> mask, const EigenOptions& options, MeshId mesh) {
  const std::size_t n = stiffness.size();
  if (mass.size() != n || mask.size() != n) throw DimensionError("eigenpair: dimension mismatch");
  if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; }))
    throw DomainError("eigenpair: every vertex is constrained");

  const CsrMatrix a = apply_dirichlet(stiffness, mask, 1.0);
  const CsrMatrix m = apply_dirichlet(mass, mask, 0.0);
  const Execution exec = options.exec;

  std::vector<double> v(n), mv(n), av(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = mask[i] ? 0.0 : 1.0;

  auto normalise = [&] {
    kernels::spmv(exec, m, v, mv);
    const double s = std::sqrt(kernels::dot(exec, v, mv));
    for (std::size_t i = 0; i < n; ++i) {
      v[i] /= s;
      mv[i] /= s;
    }
  };
  auto rayleigh = [&] {
    kernels::spmv(exec, a, v, av);
    return kernels::dot(exec, v, av) / kernels::dot(exec, v, mv);
  };

  normalise();
  double lambda = rayleigh();
  PcgWorkspace work;
  PcgOptions pcg;
  pcg.rel_tol = options.inner_tol;
  pcg.exec = exec;
  Eigenpair out;
  for (int it = 1; it <= options.max_iter; ++it) {
    // Warm start with v / lambda, the exact solution once converged.
    std::vector<double> x(v);
    for (double& xi : x) xi /= lambda;
    const auto rep = pcg_solve_into(a, mv, x, pcg, work);
    if (!rep.converged) throw SolverError("eigenpair: inner solve did not converge");
    v.swap(x);
    normalise();
    const double next = rayleigh();
    out.iterations = it;
    const bool done = std::abs(next - lambda) <= options.tol * std::abs(next);
    lambda = next;
    if (done) break;
  }
  out.value = lambda;
  out.vector = NodalField{mesh, std::move(v)};
  return out;
}

}  // namespace surfpart
