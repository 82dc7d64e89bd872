// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_PRECONDITIONER_HPP
#define MATEXPRE_PRECONDITIONER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "matexpre/discretization.hpp"
#include "matexpre/error.hpp"
#include "matexpre/krylov.hpp"
#include "matexpre/matfunc.hpp"

namespace matexpre
{

struct PreconditionerConfig
{
  double t = 2.5e-4;
  double s = 0.0;
  double fprtol = 0.08;
  double exp_action_tol = 1e-7;
  int inner_restart = 30;
  int inner_max_iters = 1000;
  /// Krylov basis for the exponential actions; Lanczos uses the system's
  /// symmetrizer. Full Arnoldi costs O(max_dim^2 n) per action, which
  /// dominates at these dimensions.
  KrylovBasis basis = KrylovBasis::incomplete;
  int max_dim = 200;

  /// t > 0, s >= 0, fprtol in (0, 1), exp_action_tol < fprtol.
  void validate() const;
};

/// Inner fixed-point solve failed; carries the partial w.
class InnerSolveError : public ConvergenceError
{
public:
  InnerSolveError(const std::string& what, Vector partial, double achieved)
    : ConvergenceError(what), partial_(std::move(partial)), achieved_(achieved)
  {
  }
  const Vector& partial() const { return partial_; }
  double achieved_residual() const { return achieved_; }

private:
  Vector partial_;
  double achieved_;
};

/// Preconditioning step applied once per outer iteration:
///   r <- psi_1(i t A_s) r,
///   solve (I - exp(i t A_s)) w = r by GMRES to fprtol from w = 0,
/// and return w. The factor -i t relating w to A_s^{-1} r is not applied.
class MatExPreconditioner
{
public:
  struct Step
  {
    int inner_iterations = 0;
    double inner_residual = 0.0;
    std::int64_t spmv = 0;
  };

  /// `sys` supplies the symmetrizer; `A_s` must outlive the object.
  MatExPreconditioner(const HelmholtzSystem& sys, const CsrMatrix& A_s, PreconditionerConfig cfg);

  void apply(const Vector& r, Vector& w);

  const std::vector<Step>& steps() const { return steps_; }
  std::int64_t total_spmv() const { return total_spmv_; }
  const PreconditionerConfig& config() const { return cfg_; }

private:
  PsiActionResult action(int l, const Vector& v, int& check_from);

  const CsrMatrix& A_s_;
  Vector weight_;
  PreconditionerConfig cfg_;
  double anorm_ = 0.0;
  // One basis serves both actions, which never overlap; each keeps its own
  // convergence hint.
  ArnoldiWorkspace ws_;
  int psi_check_from_ = 1;
  int exp_check_from_ = 1;
  std::vector<Step> steps_;
  std::int64_t total_spmv_ = 0;
};

/// One application of the preconditioning step with fresh state.
Vector precondition(const HelmholtzSystem& sys, const CsrMatrix& A_s,
                    const PreconditionerConfig& cfg, const Vector& r);

struct SolveStats
{
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  double inner_mean = 0.0;
  double inner_std = 0.0;  ///< population standard deviation
  std::int64_t total_spmv = 0;
  double final_relative_residual = 0.0;
  double wall_time = 0.0;  ///< seconds
  /// True relative residual after each outer step.
  std::vector<double> outer_residuals;
  bool converged = false;
};

/// Computes inner_mean / inner_std from inner_iterations.
void finalize_inner_statistics(SolveStats& stats);

class SolveError : public ConvergenceError
{
public:
  SolveError(const std::string& what, Vector partial, SolveStats stats)
    : ConvergenceError(what), partial_(std::move(partial)), stats_(std::move(stats))
  {
  }
  const Vector& partial() const { return partial_; }
  const SolveStats& stats() const { return stats_; }

private:
  Vector partial_;
  SolveStats stats_;
};

struct OuterOptions
{
  double rtol = 1e-5;
  int restart = 30;
  int max_iters = 500;
};

/// Solves A u = -f by FGMRES preconditioned with the step above on
/// A_s = apply_shift(sys, cfg.s). Throws SolveError when the outer iteration
/// does not converge.
std::pair<Vector, SolveStats> solve_helmholtz(const HelmholtzSystem& sys,
                                              const PreconditionerConfig& cfg, const Vector& f,
                                              const OuterOptions& outer);
std::pair<Vector, SolveStats> solve_helmholtz(const HelmholtzSystem& sys,
                                              const PreconditionerConfig& cfg, const Vector& f,
                                              double outer_rtol);

/// -i t (sum_{n=0}^{N} exp(i t A)^n) psi_1(i t A) b by Horner accumulation
/// over N exponential actions after one psi_1 action.
Vector truncated_inverse_apply(const CsrMatrix& A, double t, int N, const Vector& b,
                               double action_tol = 1e-12);

/// t = 0.4/freq^2 (10/ppw)^2, s = 1/freq, fprtol = 0.08, exp_action_tol = 1e-7.
/// With `round_values`, t and s are rounded to the nearest half unit of
/// their leading decimal digit (1/34 -> 0.030).
PreconditionerConfig suggest_parameters(const Grid& grid, bool round_values = false);

/// Nearest multiple of half a unit in the leading decimal digit.
double round_half_leading_digit(double x);

}  // namespace matexpre

#endif  // MATEXPRE_PRECONDITIONER_HPP
