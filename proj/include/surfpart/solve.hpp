#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfpart/fem.hpp"
#include "surfpart/kernels.hpp"
#include "surfpart/sparse.hpp"

namespace surfpart {

struct SolveReport {
  int iterations = 0;
  // ||b - A x||_2 / ||b||_2 of the returned iterate (0 when b = 0).
  double final_residual_norm = 0.0;
  bool converged = false;
  // Relative recursive residual after each iteration; filled on request.
  std::vector<double> residual_history;
};

struct PcgOptions {
  double rel_tol = 1e-10;
  int max_iter = 10000;
  bool record_history = false;
  Execution exec = Execution::serial;
};

// Scratch vectors reused across solves of the same size.
struct PcgWorkspace {
  std::vector<double> r, z, p, q, inv_diag;
};

// Jacobi-preconditioned conjugate gradients for SPD `a`. `x` holds the
// initial guess on entry and the solution on exit. Non-convergence is
// reported, not thrown; a zero or negative diagonal throws PreconditionerError.
SolveReport pcg_solve_into(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                           const PcgOptions& options, PcgWorkspace& work);

struct PcgResult {
  std::vector<double> x;
  SolveReport report;
};
PcgResult pcg_solve(const CsrMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                    double rel_tol, int max_iter);

struct Eigenpair {
  double value = 0.0;
  NodalField vector;  // M-normalised, zero on masked vertices
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-10;           // relative change of successive Rayleigh quotients
  double inner_tol = 1e-8;      // PCG tolerance of each inverse-iteration solve
  int max_iter = 2000;
  Execution exec = Execution::serial;
};

// Smallest eigenpair of A v = lambda M v with v = 0 on masked (Dirichlet)
// vertices, by inverse power iteration.
Eigenpair smallest_eigenpair(const CsrMatrix& stiffness, const CsrMatrix& mass,
                             std::span<const std::uint8_t> dirichlet_mask, const EigenOptions& options = {},
                             MeshId mesh = 0);

}  // namespace surfpart
