// SPDX-License-Identifier: Apache-2.0

#include "matexpre/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "matexpre/error.hpp"
#include "matexpre/kernels.hpp"

namespace matexpre
{

CsrMatrix::CsrMatrix(Index n_rows, Index n_cols, std::vector<Offset> row_ptr,
                     std::vector<Index> col_idx, std::vector<Complex> values)
  : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
    values_(std::move(values))
{
  if (n_rows < 0 || n_cols < 0) {
    throw DimensionError("CsrMatrix: negative dimension");
  }
  if (row_ptr_.size() != static_cast<std::size_t>(n_rows) + 1 || row_ptr_.front() != 0) {
    throw DimensionError("CsrMatrix: row_ptr must have n_rows+1 entries starting at 0");
  }
  if (col_idx_.size() != values_.size() ||
      row_ptr_.back() != static_cast<Offset>(col_idx_.size())) {
    throw DimensionError("CsrMatrix: row_ptr.back() must equal nnz");
  }
  for (Index i = 0; i < n_rows; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) {
      throw DimensionError("CsrMatrix: row_ptr must be non-decreasing");
    }
    for (Offset k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= n_cols) {
        throw DimensionError("CsrMatrix: column index out of range in row " + std::to_string(i));
      }
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw DimensionError("CsrMatrix: column indices must be strictly increasing in row " +
                             std::to_string(i));
      }
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(Index n_rows, Index n_cols, std::span<const Triplet> triplets)
{
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      throw DimensionError("CsrMatrix::from_triplets: entry out of range");
    }
  }
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return triplets[a].row != triplets[b].row ? triplets[a].row < triplets[b].row
                                              : triplets[a].col < triplets[b].col;
  });

  std::vector<Offset> row_ptr(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<Complex> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  Index last_row = -1;
  Index last_col = -1;
  for (std::size_t k : order) {
    const Triplet& t = triplets[k];
    if (t.row == last_row && t.col == last_col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return CsrMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n)
{
  std::vector<Complex> ones(static_cast<std::size_t>(n), Complex(1.0, 0.0));
  return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const Complex> d)
{
  const auto n = static_cast<Index>(d.size());
  std::vector<Offset> row_ptr(d.size() + 1);
  std::vector<Index> col_idx(d.size());
  std::iota(row_ptr.begin(), row_ptr.end(), Offset{0});
  std::iota(col_idx.begin(), col_idx.end(), Index{0});
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                   std::vector<Complex>(d.begin(), d.end()));
}

Complex CsrMatrix::at(Index i, Index j) const
{
  if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_) {
    throw DimensionError("CsrMatrix::at: index out of range");
  }
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) {
    return 0.0;
  }
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

CsrMatrix CsrMatrix::transpose() const
{
  std::vector<Offset> row_ptr(static_cast<std::size_t>(n_cols_) + 1, 0);
  for (Index c : col_idx_) {
    ++row_ptr[c + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<Offset> cursor(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<Index> col_idx(col_idx_.size());
  std::vector<Complex> values(values_.size());
  for (Index i = 0; i < n_rows_; ++i) {
    for (Offset k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Offset dst = cursor[col_idx_[k]]++;
      col_idx[dst] = i;
      values[dst] = values_[k];
    }
  }
  return CsrMatrix(n_cols_, n_rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::plus_diagonal(std::span<const Complex> d) const
{
  if (n_rows_ != n_cols_ || d.size() != static_cast<std::size_t>(n_rows_)) {
    throw DimensionError("CsrMatrix::plus_diagonal: dimension mismatch");
  }
  std::vector<Complex> values = values_;
  for (Index i = 0; i < n_rows_; ++i) {
    const auto first = col_idx_.begin() + row_ptr_[i];
    const auto last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, i);
    if (it == last || *it != i) {
      throw DomainError("CsrMatrix::plus_diagonal: diagonal entry of row " + std::to_string(i) +
                        " is not stored");
    }
    values[static_cast<std::size_t>(it - col_idx_.begin())] += d[i];
  }
  return CsrMatrix(n_rows_, n_cols_, row_ptr_, col_idx_, std::move(values));
}

double CsrMatrix::max_abs_row_sum() const
{
  double best = 0.0;
  for (Index i = 0; i < n_rows_; ++i) {
    double sum = 0.0;
    for (Offset k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      sum += std::abs(values_[k]);
    }
    best = std::max(best, sum);
  }
  return best;
}

double CsrMatrix::norm1() const
{
  std::vector<double> col_sum(static_cast<std::size_t>(n_cols_), 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    col_sum[col_idx_[k]] += std::abs(values_[k]);
  }
  return col_sum.empty() ? 0.0 : *std::max_element(col_sum.begin(), col_sum.end());
}

Vector spmv(const CsrMatrix& A, const Vector& x)
{
  Vector y(static_cast<std::size_t>(A.rows()));
  spmv(A, x, y);
  return y;
}

void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y)
{
  if (x.size() != static_cast<std::size_t>(A.cols()) ||
      y.size() != static_cast<std::size_t>(A.rows())) {
    throw DimensionError("spmv: matrix is " + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) + " but x has length " +
                         std::to_string(x.size()));
  }
  kernels::spmv(A, x, y);
}

Complex dot_conj(const Vector& x, const Vector& y)
{
  if (x.size() != y.size()) {
    throw DimensionError("dot_conj: length mismatch");
  }
  return kernels::dot_conj(x, y);
}

double norm2(const Vector& x) { return kernels::norm2(x); }

}  // namespace matexpre
