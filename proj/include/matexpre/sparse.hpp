// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_SPARSE_HPP
#define MATEXPRE_SPARSE_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace matexpre
{

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;
using Index = std::int32_t;
using Offset = std::int64_t;

/// One (row, col, value) entry used to assemble a CsrMatrix.
struct Triplet
{
  Index row;
  Index col;
  Complex value;
};

/// Complex compressed-sparse-row matrix. Immutable after construction.
///
/// Invariants checked on construction: row_ptr has n_rows+1 non-decreasing
/// entries starting at 0 and ending at nnz; column indices are strictly
/// increasing within each row and lie in [0, n_cols).
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(Index n_rows, Index n_cols, std::vector<Offset> row_ptr, std::vector<Index> col_idx,
            std::vector<Complex> values);

  /// Duplicate (row, col) pairs are summed.
  static CsrMatrix from_triplets(Index n_rows, Index n_cols, std::span<const Triplet> triplets);
  static CsrMatrix identity(Index n);
  static CsrMatrix diagonal(std::span<const Complex> d);

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  Offset nnz() const { return row_ptr_.empty() ? 0 : row_ptr_.back(); }

  std::span<const Offset> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const Complex> values() const { return values_; }

  /// Stored value at (i, j), zero when the entry is structurally absent.
  Complex at(Index i, Index j) const;

  CsrMatrix transpose() const;

  /// Returns this + diag(d). Every diagonal entry must already be stored so
  /// the sparsity pattern is unchanged.
  CsrMatrix plus_diagonal(std::span<const Complex> d) const;

  /// Maximum absolute row sum (the infinity norm); equals the 1-norm for
  /// structurally symmetric matrices with symmetric magnitudes.
  double max_abs_row_sum() const;

  /// Maximum absolute column sum.
  double norm1() const;

private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Offset> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<Complex> values_;
};

/// y = A x. Throws DimensionError when A.cols() != x.size().
Vector spmv(const CsrMatrix& A, const Vector& x);
void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y);

/// sum_k conj(x[k]) * y[k]; the first argument is conjugated.
Complex dot_conj(const Vector& x, const Vector& y);

double norm2(const Vector& x);

}  // namespace matexpre

#endif  // MATEXPRE_SPARSE_HPP
