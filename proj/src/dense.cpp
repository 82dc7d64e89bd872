// SPDX-License-Identifier: Apache-2.0

#include "matexpre/dense.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "matexpre/error.hpp"

namespace matexpre
{

namespace
{

double norm1(const DenseMatrix& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

// Diagonal Pade approximant r_m(X) = (V - U)^{-1} (V + U); coefficients b_0..b_m.
DenseMatrix pade(const DenseMatrix& X, const double* b, int m)
{
  const Eigen::Index n = X.rows();
  const DenseMatrix I = DenseMatrix::Identity(n, n);
  const DenseMatrix X2 = X * X;
  DenseMatrix U;
  DenseMatrix V;
  if (m == 13) {
    const DenseMatrix X4 = X2 * X2;
    const DenseMatrix X6 = X4 * X2;
    const DenseMatrix inner_u = b[13] * X6 + b[11] * X4 + b[9] * X2;
    U = X * (X6 * inner_u + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * I);
    const DenseMatrix inner_v = b[12] * X6 + b[10] * X4 + b[8] * X2;
    V = X6 * inner_v + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I;
  }
  else {
    // Even powers X^0, X^2, ..., X^{m-1}.
    std::vector<DenseMatrix> powers{I, X2};
    for (int k = 4; k < m; k += 2) {
      powers.push_back(powers.back() * X2);
    }
    DenseMatrix u_sum = DenseMatrix::Zero(n, n);
    V = DenseMatrix::Zero(n, n);
    for (int k = 0; k <= m / 2; ++k) {
      u_sum += b[2 * k + 1] * powers[static_cast<std::size_t>(k)];
      V += b[2 * k] * powers[static_cast<std::size_t>(k)];
    }
    U = X * u_sum;
  }
  return (V - U).partialPivLu().solve(V + U);
}

constexpr std::array<double, 4> b3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> b5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> b7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                   25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> b9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                    30270240.0,    2162160.0,    110880.0,     3960.0,
                                    90.0,          1.0};
constexpr std::array<double, 14> b13{64764752532480000.0,
                                     32382376266240000.0,
                                     7771770303897600.0,
                                     1187353796428800.0,
                                     129060195264000.0,
                                     10559470521600.0,
                                     670442572800.0,
                                     33522128640.0,
                                     1323241920.0,
                                     40840800.0,
                                     960960.0,
                                     16380.0,
                                     182.0,
                                     1.0};

// Largest 1-norms for which degree m meets unit roundoff in double.
constexpr double theta3 = 1.495585217958292e-2;
constexpr double theta5 = 2.539398330063230e-1;
constexpr double theta7 = 9.504178996162932e-1;
constexpr double theta9 = 2.097847961257068e0;
constexpr double theta13 = 5.371920351148152e0;

}  // namespace

DenseMatrix dense_exp(const DenseMatrix& M)
{
  if (M.rows() != M.cols()) {
    throw DimensionError("dense_exp: matrix must be square");
  }
  if (M.rows() == 0) {
    return M;
  }
  const double nrm = norm1(M);
  if (!std::isfinite(nrm)) {
    throw DomainError("dense_exp: non-finite matrix entries");
  }
  if (nrm <= theta3) return pade(M, b3.data(), 3);
  if (nrm <= theta5) return pade(M, b5.data(), 5);
  if (nrm <= theta7) return pade(M, b7.data(), 7);
  if (nrm <= theta9) return pade(M, b9.data(), 9);

  const int s = nrm > theta13 ? static_cast<int>(std::ceil(std::log2(nrm / theta13))) : 0;
  DenseMatrix R = pade(M * std::ldexp(1.0, -s), b13.data(), 13);
  for (int k = 0; k < s; ++k) {
    R = R * R;
  }
  return R;
}

DenseMatrix to_dense(const CsrMatrix& A)
{
  DenseMatrix M = DenseMatrix::Zero(A.rows(), A.cols());
  const auto row_ptr = A.row_ptr();
  const auto col_idx = A.col_idx();
  const auto values = A.values();
  for (Index i = 0; i < A.rows(); ++i) {
    for (Offset k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      M(i, col_idx[k]) = values[k];
    }
  }
  return M;
}

CsrMatrix to_csr(const DenseMatrix& M, double drop_tol)
{
  std::vector<Offset> row_ptr{0};
  std::vector<Index> col_idx;
  std::vector<Complex> values;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (std::abs(M(i, j)) > drop_tol) {
        col_idx.push_back(static_cast<Index>(j));
        values.push_back(M(i, j));
      }
    }
    row_ptr.push_back(static_cast<Offset>(col_idx.size()));
  }
  return CsrMatrix(static_cast<Index>(M.rows()), static_cast<Index>(M.cols()), std::move(row_ptr),
                   std::move(col_idx), std::move(values));
}

DenseVector to_dense(const Vector& v)
{
  return Eigen::Map<const DenseVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector to_vector(const DenseVector& v) { return Vector(v.data(), v.data() + v.size()); }

}  // namespace matexpre
