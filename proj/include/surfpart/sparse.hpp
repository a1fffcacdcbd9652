#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "surfpart/mesh.hpp"

namespace surfpart {

// Square matrix in compressed sparse row form. Column indices are sorted
// within each row and every row stores its diagonal.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<Index> cols,
            std::vector<double> values, bool symmetric);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const Index> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Position of (row, col) in values(), or npos.
  std::size_t find(std::size_t row, std::size_t col) const;
  double at(std::size_t row, std::size_t col) const;
  std::vector<double> diagonal() const;
  double inf_norm() const;
  bool structurally_symmetric() const;
  bool numerically_symmetric(double tol) const;
  bool same_pattern(const CsrMatrix& other) const;

  // a * this + b * other; both matrices must share a sparsity pattern.
  CsrMatrix combine(double a, const CsrMatrix& other, double b) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

// Vertex-adjacency pattern of a mesh (diagonal included), zero values.
CsrMatrix mesh_pattern(const TriangulatedSurface& mesh);

}  // namespace surfpart
