// SPDX-License-Identifier: Apache-2.0

#include "matexpre/krylov.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "matexpre/error.hpp"
#include "matexpre/kernels.hpp"

namespace matexpre
{

LinearOperator LinearOperator::from_matrix(const CsrMatrix& A)
{
  if (A.rows() != A.cols()) {
    throw DimensionError("LinearOperator::from_matrix: matrix must be square");
  }
  return LinearOperator{[&A](const Vector& x, Vector& y) { kernels::spmv(A, x, y); },
                        static_cast<std::size_t>(A.rows())};
}

namespace
{

// Rotation [c, s; -conj(s), c] zeroing b in (a, b).
void make_givens(Complex a, Complex b, double& c, Complex& s)
{
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (abs_a == 0.0) {
    c = 0.0;
    s = std::conj(b) / abs_b;
    return;
  }
  const double r = std::hypot(abs_a, abs_b);
  c = abs_a / r;
  s = (a / abs_a) * std::conj(b) / r;
}

void apply_givens(double c, Complex s, Complex& x, Complex& y)
{
  const Complex xn = c * x + s * y;
  y = -std::conj(s) * x + c * y;
  x = xn;
}

void validate(const LinearOperator& op, const Vector& b, const KrylovOptions& opts)
{
  if (b.size() != op.dim) {
    throw DimensionError("gmres: right-hand side length " + std::to_string(b.size()) +
                         " does not match operator dimension " + std::to_string(op.dim));
  }
  if (!(opts.rtol > 0.0 && opts.rtol < 1.0)) {
    throw DomainError("gmres: rtol must lie in (0, 1)");
  }
  if (opts.restart < 1) {
    throw DomainError("gmres: restart must be >= 1");
  }
  if (opts.max_iters < 0) {
    throw DomainError("gmres: max_iters must be nonnegative");
  }
}

KrylovResult run(const LinearOperator& op, const ApplyFn* precond, const Vector& b,
                 const Vector& x0, const KrylovOptions& opts)
{
  validate(op, b, opts);
  const std::size_t n = op.dim;
  const int m = opts.restart;
  KrylovResult res;
  res.x = x0;
  const double bnorm = kernels::norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.residual_history.push_back(0.0);
    res.converged = true;
    return res;
  }

  Vector r(n);
  Vector tmp(n);
  bool x_nonzero = false;
  for (const Complex& xi : res.x) {
    if (xi != 0.0) {
      x_nonzero = true;
      break;
    }
  }
  auto true_residual = [&]() {
    if (x_nonzero) {
      op.apply(res.x, tmp);
      ++res.operator_applications;
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
    }
    else {
      kernels::copy(b, r);
    }
    return kernels::norm2(r);
  };

  // Sized on first use: most solves stop well before the restart length.
  std::vector<Vector> V(static_cast<std::size_t>(m) + 1);
  std::vector<Vector> Z(precond != nullptr ? static_cast<std::size_t>(m) : 0);
  V[0].resize(n);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<double> cs(static_cast<std::size_t>(m));
  std::vector<Complex> sn(static_cast<std::size_t>(m));
  std::vector<Complex> g(static_cast<std::size_t>(m) + 1);

  double beta = true_residual();
  res.residual_history.push_back(beta / bnorm);
  if (beta / bnorm <= opts.rtol) {
    res.converged = true;
    return res;
  }

  while (res.iterations < opts.max_iters) {
    H.setZero();
    kernels::copy(r, V[0]);
    kernels::scale(1.0 / beta, V[0]);
    std::fill(g.begin(), g.end(), Complex(0.0));
    g[0] = beta;

    int k = 0;  // columns built in this cycle
    for (int j = 0; j < m && res.iterations < opts.max_iters; ++j) {
      Vector& w = V[static_cast<std::size_t>(j) + 1];
      w.resize(n);
      if (precond != nullptr) {
        Z[static_cast<std::size_t>(j)].resize(n);
        (*precond)(V[static_cast<std::size_t>(j)], Z[static_cast<std::size_t>(j)]);
        op.apply(Z[static_cast<std::size_t>(j)], w);
      }
      else {
        op.apply(V[static_cast<std::size_t>(j)], w);
      }
      ++res.iterations;
      ++res.operator_applications;

      const double norm_before = kernels::norm2(w);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Complex hij = kernels::dot_conj(V[static_cast<std::size_t>(i)], w);
          H(i, j) += hij;
          kernels::axpy(-hij, V[static_cast<std::size_t>(i)], w);
        }
        if (pass == 0 && kernels::norm2(w) > norm_before / std::sqrt(2.0)) {
          break;
        }
      }
      const double hnext = kernels::norm2(w);
      H(j + 1, j) = hnext;
      const bool lucky = hnext <= 1e-14 * norm_before;
      if (!lucky) {
        kernels::scale(1.0 / hnext, w);
      }

      for (int i = 0; i < j; ++i) {
        apply_givens(cs[static_cast<std::size_t>(i)], sn[static_cast<std::size_t>(i)], H(i, j),
                     H(i + 1, j));
      }
      make_givens(H(j, j), H(j + 1, j), cs[static_cast<std::size_t>(j)],
                  sn[static_cast<std::size_t>(j)]);
      apply_givens(cs[static_cast<std::size_t>(j)], sn[static_cast<std::size_t>(j)], H(j, j),
                   H(j + 1, j));
      apply_givens(cs[static_cast<std::size_t>(j)], sn[static_cast<std::size_t>(j)],
                   g[static_cast<std::size_t>(j)], g[static_cast<std::size_t>(j) + 1]);
      k = j + 1;

      double rel = std::abs(g[static_cast<std::size_t>(j) + 1]) / bnorm;
      if (opts.true_residual_history) {
        // x_k without committing: x + sum y_i (Z or V)_i
        Eigen::VectorXcd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::Map<const Eigen::VectorXcd>(g.data(), k));
        Vector xk = res.x;
        for (int i = 0; i < k; ++i) {
          kernels::axpy(y(i), precond != nullptr ? Z[static_cast<std::size_t>(i)]
                                                 : V[static_cast<std::size_t>(i)], xk);
        }
        op.apply(xk, tmp);
        ++res.operator_applications;
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
        rel = kernels::norm2(r) / bnorm;
      }
      res.residual_history.push_back(rel);
      if (opts.monitor) opts.monitor(res.iterations, rel);
      if (rel <= opts.rtol || lucky) {
        break;
      }
    }

    Eigen::VectorXcd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
      Eigen::Map<const Eigen::VectorXcd>(g.data(), k));
    for (int i = 0; i < k; ++i) {
      kernels::axpy(y(i), precond != nullptr ? Z[static_cast<std::size_t>(i)]
                                             : V[static_cast<std::size_t>(i)], res.x);
    }
    x_nonzero = true;
    // With true residual history, r already holds b - op(x) for this x.
    beta = opts.true_residual_history ? kernels::norm2(r) : true_residual();
    res.residual_history.back() = beta / bnorm;
    if (beta / bnorm <= opts.rtol) {
      res.converged = true;
      return res;
    }
    if (beta == 0.0) {
      break;
    }
  }
  return res;
}

}  // namespace

KrylovResult gmres(const LinearOperator& op, const Vector& b, const Vector& x0,
                   const KrylovOptions& opts)
{
  if (x0.size() != op.dim) {
    throw DimensionError("gmres: initial guess length does not match operator dimension");
  }
  return run(op, nullptr, b, x0, opts);
}

KrylovResult gmres(const LinearOperator& op, const Vector& b, const Vector& x0, double rtol,
                   int restart, int max_iters)
{
  KrylovOptions opts;
  opts.rtol = rtol;
  opts.restart = restart;
  opts.max_iters = max_iters;
  return gmres(op, b, x0, opts);
}

KrylovResult fgmres(const LinearOperator& op, const ApplyFn& precond, const Vector& b,
                    const KrylovOptions& opts)
{
  return run(op, &precond, b, Vector(op.dim, 0.0), opts);
}

KrylovResult fgmres(const LinearOperator& op, const ApplyFn& precond, const Vector& b,
                    double rtol, int restart, int max_iters)
{
  KrylovOptions opts;
  opts.rtol = rtol;
  opts.restart = restart;
  opts.max_iters = max_iters;
  return fgmres(op, precond, b, opts);
}

}  // namespace matexpre
