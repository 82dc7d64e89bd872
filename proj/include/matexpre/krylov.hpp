// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_KRYLOV_HPP
#define MATEXPRE_KRYLOV_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "matexpre/sparse.hpp"

namespace matexpre
{

/// y = op(x); y arrives sized to `dim`.
using ApplyFn = std::function<void(const Vector& x, Vector& y)>;

struct LinearOperator
{
  ApplyFn apply;
  std::size_t dim = 0;

  static LinearOperator from_matrix(const CsrMatrix& A);
};

struct KrylovOptions
{
  double rtol = 1e-5;
  int restart = 30;
  int max_iters = 1000;
  /// Record ||b - op(x_k)|| / ||b|| (one extra operator application per step)
  /// instead of the rotation estimate.
  bool true_residual_history = false;
  /// Called after every step with (iteration, relative residual).
  std::function<void(int, double)> monitor;
};

struct KrylovResult
{
  Vector x;
  int iterations = 0;  ///< Krylov steps (one operator application each)
  int operator_applications = 0;  ///< steps plus residual verifications
  /// Relative residual before the first step, then one entry per step; the
  /// entry of a step that ends a cycle is the verified true residual.
  std::vector<double> residual_history;
  bool converged = false;
};

/// Restarted GMRES(restart) from x0. Convergence is declared on the rotation
/// estimate and confirmed with a true residual; on a miss the iteration
/// resumes from the verified residual. Zero b returns x = 0 without steps.
KrylovResult gmres(const LinearOperator& op, const Vector& b, const Vector& x0, double rtol,
                   int restart, int max_iters);
KrylovResult gmres(const LinearOperator& op, const Vector& b, const Vector& x0,
                   const KrylovOptions& opts);

/// Right-preconditioned flexible GMRES from x0 = 0; `precond` may differ
/// between calls. The residual is the unpreconditioned one.
KrylovResult fgmres(const LinearOperator& op, const ApplyFn& precond, const Vector& b,
                    double rtol, int restart, int max_iters);
KrylovResult fgmres(const LinearOperator& op, const ApplyFn& precond, const Vector& b,
                    const KrylovOptions& opts);

}  // namespace matexpre

#endif  // MATEXPRE_KRYLOV_HPP
