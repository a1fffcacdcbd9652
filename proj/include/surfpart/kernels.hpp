#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version
// and an OpenMP version producing bitwise-identical output for any thread
// count: reductions are accumulated in fixed-size blocks and the block
// partials are summed in block order.

#include <cstddef>
#include <span>
#include <vector>

#include "surfpart/mesh.hpp"
#include "surfpart/sparse.hpp"

namespace surfpart {

enum class Execution { serial, parallel };

namespace kernels {

inline constexpr std::size_t kReductionBlock = 2048;
inline constexpr std::size_t kMaxComponents = 32;

// Per-triangle 3x3 element matrices, row-major, 9 doubles per triangle.
struct ElementMatrices {
  std::vector<double> mass;
  std::vector<double> stiffness;
  std::vector<double> area;
};

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// Splitting step 2: u_i <- u_i exp(-factor (S - u_i^2)), S = sum_j u_j^2.
void ode_step(std::span<const std::span<double>> components, double factor);
ElementMatrices element_matrices(const TriangulatedSurface& mesh);

}  // namespace serial

namespace omp {

// threads <= 0 uses the OpenMP default.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, int threads = 0);
double dot(std::span<const double> x, std::span<const double> y, int threads = 0);
void axpy(double alpha, std::span<const double> x, std::span<double> y, int threads = 0);
void ode_step(std::span<const std::span<double>> components, double factor, int threads = 0);
ElementMatrices element_matrices(const TriangulatedSurface& mesh, int threads = 0);

}  // namespace omp

inline void spmv(Execution e, const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  e == Execution::serial ? serial::spmv(a, x, y) : omp::spmv(a, x, y);
}
inline double dot(Execution e, std::span<const double> x, std::span<const double> y) {
  return e == Execution::serial ? serial::dot(x, y) : omp::dot(x, y);
}

// Per-vertex sum of squares in ascending order, so the result does not
// depend on the component ordering.
double sorted_square_sum(const double* squares, std::size_t m);

}  // namespace kernels
}  // namespace surfpart
