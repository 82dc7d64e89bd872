// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_DENSE_HPP
#define MATEXPRE_DENSE_HPP

#include <Eigen/Dense>

#include "matexpre/sparse.hpp"

namespace matexpre
{

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Matrix exponential by scaling and squaring with a diagonal Pade
/// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm.
DenseMatrix dense_exp(const DenseMatrix& M);

DenseMatrix to_dense(const CsrMatrix& A);

/// Drops entries with |a_ij| <= drop_tol.
CsrMatrix to_csr(const DenseMatrix& M, double drop_tol = 0.0);

DenseVector to_dense(const Vector& v);
Vector to_vector(const DenseVector& v);

}  // namespace matexpre

#endif  // MATEXPRE_DENSE_HPP
