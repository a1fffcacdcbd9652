#include "surfpart/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "surfpart/error.hpp"

namespace surfpart {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<Index> cols,
                     std::vector<double> values, bool symmetric)
    : n_(n),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)),
      symmetric_(symmetric) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.back() != cols_.size() || cols_.size() != values_.size())
    throw DimensionError("inconsistent CSR arrays");
}

std::size_t CsrMatrix::find(std::size_t row, std::size_t col) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, static_cast<Index>(col));
  if (it == last || *it != col) return npos;
  return static_cast<std::size_t>(it - cols_.begin());
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
  const auto k = find(row, col);
  return k == npos ? 0.0 : values_[k];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

double CsrMatrix::inf_norm() const {
  double r = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    r = std::max(r, s);
  }
  return r;
}

bool CsrMatrix::structurally_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (find(cols_[k], i) == npos) return false;
  return true;
}

bool CsrMatrix::numerically_symmetric(double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto t = find(cols_[k], i);
      if (t == npos || std::abs(values_[k] - values_[t]) > tol) return false;
    }
  return true;
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
  return n_ == other.n_ && row_ptr_ == other.row_ptr_ && cols_ == other.cols_;
}

CsrMatrix CsrMatrix::combine(double a, const CsrMatrix& other, double b) const {
  if (!same_pattern(other)) throw DimensionError("combine requires identical sparsity patterns");
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a * values_[k] + b * other.values_[k];
  return CsrMatrix(n_, row_ptr_, cols_, std::move(v), symmetric_ && other.symmetric_);
}

CsrMatrix mesh_pattern(const TriangulatedSurface& mesh) {
  const auto nb = vertex_neighbors(mesh);
  const std::size_t n = mesh.num_vertices();
  std::vector<std::size_t> row_ptr(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + nb[i].size() + 1;
  std::vector<Index> cols;
  cols.reserve(row_ptr.back());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Index> row = nb[i];
    row.push_back(static_cast<Index>(i));
    std::sort(row.begin(), row.end());
    cols.insert(cols.end(), row.begin(), row.end());
  }
  std::vector<double> values(cols.size(), 0.0);
  return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(values), true);
}

}  // namespace surfpart
