#include "diffgt/numerics/sparse.hpp"

#include <algorithm>

#include "diffgt/error.hpp"

namespace diffgt {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) throw ShapeError("from_triplets: coordinate out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!m.col_idx_.empty() && i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col) {
      m.values_.back() += e.value;
      continue;
    }
    m.col_idx_.push_back(e.col);
    m.values_.push_back(e.value);
    ++m.row_ptr_[e.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw ShapeError("SparseMatrix::at: out of range");
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Matrix SparseMatrix::multiply(const Matrix& dense) const {
  if (dense.rows() != cols_) {
    throw ShapeError("spmm: " + std::to_string(rows_) + "x" + std::to_string(cols_) + " x " +
                     shape_string(dense));
  }
  const std::size_t width = dense.cols();
  Matrix out(rows_, width);
  for (std::size_t r = 0; r < rows_; ++r) {
    double* dst = out.row(r).data();
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double w = values_[k];
      const double* src = dense.row(col_idx_[k]).data();
      for (std::size_t c = 0; c < width; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

Matrix SparseMatrix::multiply_transposed(const Matrix& dense) const {
  if (dense.rows() != rows_) {
    throw ShapeError("spmm_t: (" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")^T x " +
                     shape_string(dense));
  }
  const std::size_t width = dense.cols();
  Matrix out(cols_, width);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* src = dense.row(r).data();
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double w = values_[k];
      double* dst = out.row(col_idx_[k]).data();
      for (std::size_t c = 0; c < width; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> entries;
  entries.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      entries.push_back({col_idx_[k], r, values_[k]});
  return from_triplets(cols_, rows_, std::move(entries));
}

Matrix SparseMatrix::to_dense() const {
  Matrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out(r, col_idx_[k]) = values_[k];
  return out;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (at(col_idx_[k], r) != values_[k]) return false;
  return true;
}

}  // namespace diffgt
