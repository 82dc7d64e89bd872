// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_MATFUNC_HPP
#define MATEXPRE_MATFUNC_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "matexpre/dense.hpp"
#include "matexpre/error.hpp"
#include "matexpre/sparse.hpp"

namespace matexpre
{

/// Largest l accepted by psi_scalar and psi_dense.
inline constexpr int max_psi_order = 8;

/// psi_0 = exp, psi_{l+1}(z) = (psi_l(z) - 1/l!)/z, extended by continuity
/// at z = 0 (psi_l(0) = 1/l!). Taylor series for |z| < max(1, l), where its
/// terms decrease monotonically; the recurrence from exp(z) elsewhere.
Complex psi_scalar(int l, Complex z);

/// psi_l(M) for square M, from the exponential of the block matrix
/// [[M, I, 0, ...], [0, 0, I, ...], ..., [0, ..., 0]] of size (l+1) n, whose
/// first block row is [psi_0(M), psi_1(M), ..., psi_l(M)].
DenseMatrix psi_dense(int l, const DenseMatrix& M);

/// m x (p+1) matrix whose column k is psi_k(M) e_1, k = 0..p, from a single
/// exponential of the (m+p) x (m+p) augmented matrix.
DenseMatrix psi_columns(const DenseMatrix& M, int p);

enum class KrylovBasis
{
  arnoldi,  ///< modified Gram-Schmidt with one reorthogonalization pass
  lanczos,  ///< three-term recurrence in the bilinear form x^T diag(weight) y
  /// Gram-Schmidt against the previous `window` vectors only. The Arnoldi
  /// relation A V = V H + h v e^T still holds, so the projection is exact on
  /// polynomials; orthogonality is only local.
  incomplete,
};

/// Krylov storage reused across psi_action calls.
///
/// `basis` holds the vectors of the last cycle and `hess` its projected
/// matrix (upper Hessenberg for Arnoldi, tridiagonal for Lanczos).
/// `check_from` records where the last cycle converged so that the next
/// call with a similar operator skips hopeless early convergence checks.
struct ArnoldiWorkspace
{
  std::vector<Vector> basis;
  DenseMatrix hess;
  int max_dim = 60;
  int check_from = 1;
};

struct PsiActionOptions
{
  double tol = 1e-7;
  /// Cap on the Krylov dimension per cycle; further reduced so that the basis
  /// fits in `memory_budget` bytes.
  int max_dim = 60;
  /// Maximum number of time substeps.
  int max_substeps = 1000;
  KrylovBasis basis = KrylovBasis::arnoldi;
  /// Diagonal of the symmetrizer W (W A symmetric) for the Lanczos basis.
  /// Empty means W = I.
  std::span<const Complex> weight{};
  /// Orthogonalization window of the incomplete basis.
  int window = 4;
  std::size_t memory_budget = std::size_t{2} << 30;
  /// Bound on ||A|| used for breakdown tests; computed from A when zero.
  double norm_estimate = 0.0;
  ArnoldiWorkspace* workspace = nullptr;
};

struct PsiActionResult
{
  Vector w;
  int spmv_count = 0;     ///< sparse products with A; zero only for v = 0
  double est_error = 0.0; ///< accumulated a-posteriori estimate, absolute
  int substeps = 0;
  int max_krylov_dim = 0;
};

/// Thrown when psi_action exhausts its substeps; carries the partial state.
class PsiActionError : public ConvergenceError
{
public:
  PsiActionError(const std::string& what, PsiActionResult partial)
    : ConvergenceError(what), partial_(std::move(partial))
  {
  }
  const PsiActionResult& partial() const { return partial_; }

private:
  PsiActionResult partial_;
};

/// w ~ psi_l(i t A) v for l in {0, 1, 2} with est_error <= tol ||v||.
///
/// A Krylov space of dimension at most max_dim approximates the action over
/// a time substep [sigma, sigma + dt] of u(sigma) = sigma^l psi_l(sigma i t A) v,
/// which solves u' = i t A u + sigma^(l-1)/(l-1)! v. When a cycle does not
/// converge for the whole remaining interval, the largest substep meeting
/// tol dt ||v|| is taken and a new cycle starts from the updated state.
PsiActionResult psi_action(int l, const CsrMatrix& A, double t, const Vector& v,
                           const PsiActionOptions& opts);

PsiActionResult psi_action(int l, const CsrMatrix& A, double t, const Vector& v, double tol);

}  // namespace matexpre

#endif  // MATEXPRE_MATFUNC_HPP
