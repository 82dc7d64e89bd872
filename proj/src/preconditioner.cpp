// SPDX-License-Identifier: Apache-2.0

#include "matexpre/preconditioner.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "matexpre/kernels.hpp"

namespace matexpre
{

void PreconditionerConfig::validate() const
{
  if (!(t > 0.0)) throw DomainError("PreconditionerConfig: t must be positive");
  if (!(s >= 0.0)) throw DomainError("PreconditionerConfig: s must be nonnegative");
  if (!(fprtol > 0.0 && fprtol < 1.0)) {
    throw DomainError("PreconditionerConfig: fprtol must lie in (0, 1)");
  }
  if (!(exp_action_tol > 0.0 && exp_action_tol < fprtol)) {
    throw DomainError("PreconditionerConfig: exp_action_tol must lie in (0, fprtol)");
  }
  if (inner_restart < 1 || inner_max_iters < 1 || max_dim < 1) {
    throw DomainError("PreconditionerConfig: restart, iteration and dimension caps must be >= 1");
  }
}

MatExPreconditioner::MatExPreconditioner(const HelmholtzSystem& sys, const CsrMatrix& A_s,
                                         PreconditionerConfig cfg)
  : A_s_(A_s), weight_(sys.symmetrizer), cfg_(cfg)
{
  cfg_.validate();
  if (static_cast<std::size_t>(A_s.rows()) != sys.size() || A_s.rows() != A_s.cols()) {
    throw DimensionError("MatExPreconditioner: A_s does not match the system");
  }
  anorm_ = A_s.max_abs_row_sum();
}

PsiActionResult MatExPreconditioner::action(int l, const Vector& v, int& check_from)
{
  PsiActionOptions opts;
  opts.tol = cfg_.exp_action_tol;
  opts.max_dim = cfg_.max_dim;
  opts.basis = cfg_.basis;
  if (cfg_.basis == KrylovBasis::lanczos) {
    opts.weight = weight_;
  }
  opts.norm_estimate = anorm_;
  opts.workspace = &ws_;
  ws_.check_from = check_from;
  PsiActionResult res = psi_action(l, A_s_, cfg_.t, v, opts);
  check_from = ws_.check_from;
  return res;
}

void MatExPreconditioner::apply(const Vector& r, Vector& w)
{
  Step step;
  w.assign(r.size(), 0.0);
  if (kernels::norm2(r) == 0.0) {
    steps_.push_back(step);
    return;
  }
  PsiActionResult rhs = action(1, r, psi_check_from_);
  step.spmv += rhs.spmv_count;

  const LinearOperator fixed_point{[this, &step](const Vector& x, Vector& y) {
                                     PsiActionResult e = action(0, x, exp_check_from_);
                                     step.spmv += e.spmv_count;
                                     for (std::size_t i = 0; i < x.size(); ++i) {
                                       y[i] = x[i] - e.w[i];
                                     }
                                   },
                                   r.size()};
  KrylovOptions opts;
  opts.rtol = cfg_.fprtol;
  opts.restart = cfg_.inner_restart;
  opts.max_iters = cfg_.inner_max_iters;
  KrylovResult inner = gmres(fixed_point, rhs.w, Vector(r.size(), 0.0), opts);
  step.inner_iterations = inner.iterations;
  step.inner_residual = inner.residual_history.back();
  total_spmv_ += step.spmv;
  steps_.push_back(step);
  if (!inner.converged) {
    throw InnerSolveError("inner GMRES reached " + std::to_string(inner.iterations) +
                            " iterations at relative residual " +
                            std::to_string(step.inner_residual),
                          std::move(inner.x), step.inner_residual);
  }
  w = std::move(inner.x);
}

Vector precondition(const HelmholtzSystem& sys, const CsrMatrix& A_s,
                    const PreconditionerConfig& cfg, const Vector& r)
{
  if (r.size() != sys.size()) {
    throw DimensionError("precondition: vector length does not match the system");
  }
  MatExPreconditioner pc(sys, A_s, cfg);
  Vector w;
  pc.apply(r, w);
  return w;
}

void finalize_inner_statistics(SolveStats& stats)
{
  const std::size_t n = stats.inner_iterations.size();
  if (n == 0) {
    stats.inner_mean = 0.0;
    stats.inner_std = 0.0;
    return;
  }
  double sum = 0.0;
  for (int k : stats.inner_iterations) sum += k;
  stats.inner_mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (int k : stats.inner_iterations) {
    const double d = k - stats.inner_mean;
    sq += d * d;
  }
  stats.inner_std = std::sqrt(sq / static_cast<double>(n));
}

std::pair<Vector, SolveStats> solve_helmholtz(const HelmholtzSystem& sys,
                                              const PreconditionerConfig& cfg, const Vector& f,
                                              const OuterOptions& outer)
{
  const auto start = std::chrono::steady_clock::now();
  if (f.size() != sys.size()) {
    throw DimensionError("solve_helmholtz: source length " + std::to_string(f.size()) +
                         " does not match system size " + std::to_string(sys.size()));
  }
  cfg.validate();
  SolveStats stats;
  Vector rhs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];

  const CsrMatrix A_s = apply_shift(sys, cfg.s);
  MatExPreconditioner pc(sys, A_s, cfg);
  std::int64_t outer_spmv = 0;
  const LinearOperator op{[&](const Vector& x, Vector& y) {
                            kernels::spmv(sys.A, x, y);
                            ++outer_spmv;
                          },
                          sys.size()};
  const ApplyFn precond = [&pc](const Vector& r, Vector& w) { pc.apply(r, w); };

  KrylovOptions opts;
  opts.rtol = outer.rtol;
  opts.restart = outer.restart;
  opts.max_iters = outer.max_iters;
  opts.true_residual_history = true;

  auto fill_stats = [&](const KrylovResult& res) {
    stats.outer_iterations = res.iterations;
    stats.inner_iterations.clear();
    for (const auto& s : pc.steps()) stats.inner_iterations.push_back(s.inner_iterations);
    finalize_inner_statistics(stats);
    stats.total_spmv = outer_spmv + pc.total_spmv();
    stats.outer_residuals.assign(res.residual_history.begin() + 1, res.residual_history.end());
    stats.final_relative_residual = res.residual_history.back();
    stats.converged = res.converged;
    stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  KrylovResult res;
  try {
    res = fgmres(op, precond, rhs, opts);
  }
  catch (const InnerSolveError& e) {
    KrylovResult partial;
    partial.iterations = static_cast<int>(pc.steps().size());
    partial.residual_history = {1.0};
    fill_stats(partial);
    throw SolveError(std::string("solve_helmholtz: ") + e.what(), Vector(f.size(), 0.0), stats);
  }
  fill_stats(res);
  if (!res.converged) {
    throw SolveError("solve_helmholtz: FGMRES stopped after " + std::to_string(res.iterations) +
                       " iterations at relative residual " +
                       std::to_string(stats.final_relative_residual),
                     std::move(res.x), stats);
  }
  return {std::move(res.x), stats};
}

std::pair<Vector, SolveStats> solve_helmholtz(const HelmholtzSystem& sys,
                                              const PreconditionerConfig& cfg, const Vector& f,
                                              double outer_rtol)
{
  OuterOptions outer;
  outer.rtol = outer_rtol;
  return solve_helmholtz(sys, cfg, f, outer);
}

Vector truncated_inverse_apply(const CsrMatrix& A, double t, int N, const Vector& b,
                               double action_tol)
{
  if (N < 0) throw DomainError("truncated_inverse_apply: N must be nonnegative");
  if (!(t > 0.0)) throw DomainError("truncated_inverse_apply: t must be positive");
  PsiActionOptions opts;
  opts.tol = action_tol;
  const Vector y = psi_action(1, A, t, b, opts).w;
  Vector acc = y;
  for (int k = 0; k < N; ++k) {
    Vector e = psi_action(0, A, t, acc, opts).w;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = y[i] + e[i];
  }
  kernels::scale(Complex(0.0, -t), acc);
  return acc;
}

double round_half_leading_digit(double x)
{
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("round_half_leading_digit: value must be positive and finite");
  }
  const double unit = 0.5 * std::pow(10.0, std::floor(std::log10(x)));
  return std::round(x / unit) * unit;
}

PreconditionerConfig suggest_parameters(const Grid& grid, bool round_values)
{
  grid.validate();
  const double freq = grid.freq();
  const double scale = 10.0 / grid.ppw;
  PreconditionerConfig cfg;
  cfg.t = 0.4 / (freq * freq) * scale * scale;
  cfg.s = 1.0 / freq;
  cfg.fprtol = 0.08;
  cfg.exp_action_tol = 1e-7;
  if (round_values) {
    cfg.t = round_half_leading_digit(cfg.t);
    cfg.s = round_half_leading_digit(cfg.s);
  }
  return cfg;
}

}  // namespace matexpre
