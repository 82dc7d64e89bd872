// SPDX-License-Identifier: Apache-2.0

#include "matexpre/matfunc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/SparseCore>

#include "matexpre/kernels.hpp"

namespace matexpre
{

namespace
{

constexpr std::array<double, max_psi_order + 1> inv_factorial{
  1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0, 1.0 / 720.0, 1.0 / 5040.0, 1.0 / 40320.0};

void check_order(int l, const char* who)
{
  if (l < 0 || l > max_psi_order) {
    throw DomainError(std::string(who) + ": order l must lie in [0, " +
                      std::to_string(max_psi_order) + "]");
  }
}

// sum_k z^k/(k+l)!; terms shrink monotonically for |z| < l+1, summed from the
// smallest up.
Complex psi_taylor(int l, Complex z)
{
  std::array<Complex, 64> terms{};
  Complex term = inv_factorial[static_cast<std::size_t>(l)];
  std::size_t count = 0;
  while (count < terms.size()) {
    terms[count++] = term;
    if (std::abs(term) < 1e-18 * inv_factorial[static_cast<std::size_t>(l)]) {
      break;
    }
    term *= z / static_cast<double>(count + static_cast<std::size_t>(l));
  }
  Complex sum = 0.0;
  while (count > 0) {
    sum += terms[--count];
  }
  return sum;
}

using SparseAug = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

// exp(M) b by s steps of a truncated Taylor series with ||M/s||_1 <= 1/2;
// each step stops once two consecutive terms fall below the unit roundoff
// relative to the partial sum.
DenseVector expmv(const SparseAug& M, DenseVector b)
{
  double norm = 0.0;
  for (Eigen::Index j = 0; j < M.outerSize(); ++j) {
    double col = 0.0;
    for (SparseAug::InnerIterator it(M, j); it; ++it) col += std::abs(it.value());
    norm = std::max(norm, col);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * norm)));
  const double inv_steps = 1.0 / steps;
  DenseVector term(b.size());
  for (int s = 0; s < steps; ++s) {
    term = b;
    double prev = b.norm();
    for (int k = 1; k <= 40; ++k) {
      term = (inv_steps / k) * (M * term);
      b += term;
      const double cur = term.norm();
      if (cur + prev <= 1.1e-16 * b.norm()) break;
      prev = cur;
    }
  }
  return b;
}

}  // namespace

Complex psi_scalar(int l, Complex z)
{
  check_order(l, "psi_scalar");
  if (std::abs(z) < std::max(1.0, static_cast<double>(l))) {
    return psi_taylor(l, z);
  }
  Complex value = std::exp(z);
  for (int k = 0; k < l; ++k) {
    value = (value - inv_factorial[static_cast<std::size_t>(k)]) / z;
  }
  return value;
}

DenseMatrix psi_dense(int l, const DenseMatrix& M)
{
  check_order(l, "psi_dense");
  if (M.rows() != M.cols()) {
    throw DimensionError("psi_dense: matrix must be square");
  }
  const Eigen::Index n = M.rows();
  if (l == 0) {
    return dense_exp(M);
  }
  const Eigen::Index big = (l + 1) * n;
  DenseMatrix aug = DenseMatrix::Zero(big, big);
  aug.topLeftCorner(n, n) = M;
  for (int k = 0; k < l; ++k) {
    aug.block(k * n, (k + 1) * n, n, n).setIdentity();
  }
  const DenseMatrix E = dense_exp(aug);
  return E.block(0, l * n, n, n);
}

DenseMatrix psi_columns(const DenseMatrix& M, int p)
{
  if (M.rows() != M.cols()) {
    throw DimensionError("psi_columns: matrix must be square");
  }
  if (p < 0) {
    throw DomainError("psi_columns: p must be nonnegative");
  }
  const Eigen::Index m = M.rows();
  DenseMatrix aug = DenseMatrix::Zero(m + p, m + p);
  aug.topLeftCorner(m, m) = M;
  if (p > 0) {
    aug(0, m) = 1.0;
  }
  for (int k = 1; k < p; ++k) {
    aug(m + k - 1, m + k) = 1.0;
  }
  DenseMatrix cols(m, p + 1);
  const SparseAug sparse = SparseAug(aug.sparseView());
  if (m >= 64 && sparse.nonZeros() <= 8 * aug.rows()) {
    // Banded projections (Lanczos, incomplete basis) are far cheaper to
    // exponentiate one column at a time than as a full matrix.
    cols.col(0) = expmv(sparse, DenseVector::Unit(m + p, 0)).head(m);
    for (int k = 1; k <= p; ++k) {
      cols.col(k) = expmv(sparse, DenseVector::Unit(m + p, m + k - 1)).head(m);
    }
    return cols;
  }
  const DenseMatrix E = dense_exp(aug);
  cols.col(0) = E.col(0).head(m);
  for (int k = 1; k <= p; ++k) {
    cols.col(k) = E.col(m + k - 1).head(m);
  }
  return cols;
}

// ---------------------------------------------------------------------------
// Krylov action

namespace
{

// Thrown internally when the bilinear Lanczos recurrence breaks down.
struct LanczosBreakdown
{
};

class KrylovCycle
{
public:
  KrylovCycle(const CsrMatrix& A, const PsiActionOptions& opts, ArnoldiWorkspace& ws,
              double anorm, int cap, KrylovBasis basis, int& spmv_count)
    : spmv_count_(spmv_count), A_(A), opts_(opts), ws_(ws), anorm_(anorm), cap_(cap),
      basis_(basis)
  {
    const std::size_t n = static_cast<std::size_t>(A.rows());
    // Vectors are sized on first use; a cycle rarely fills its cap.
    if (ws_.basis.size() < static_cast<std::size_t>(cap_) + 1) {
      ws_.basis.resize(static_cast<std::size_t>(cap_) + 1);
    }
    ws_.basis[0].resize(n);
    H_ = DenseMatrix::Zero(cap_ + 1, cap_);
    if (basis_ == KrylovBasis::lanczos && !opts_.weight.empty()) {
      weight_ = opts_.weight;
    }
    else if (basis_ == KrylovBasis::lanczos) {
      ones_.assign(n, Complex(1.0, 0.0));
      weight_ = ones_;
    }
  }

  /// Normalizes q into the first basis vector; returns the scale beta with
  /// q = beta * basis[0].
  Complex start(const Vector& q)
  {
    Vector& q0 = ws_.basis[0];
    if (basis_ != KrylovBasis::lanczos) {
      const double beta = kernels::norm2(q);
      kernels::copy(q, q0);
      kernels::scale(1.0 / beta, q0);
      return beta;
    }
    const Complex bb = kernels::dot_weighted(q, weight_, q);
    const double nq = kernels::norm2(q);
    if (std::abs(bb) <= 1e-10 * nq * nq * max_weight()) {
      throw LanczosBreakdown{};
    }
    const Complex beta = std::sqrt(bb);
    kernels::copy(q, q0);
    kernels::scale(1.0 / beta, q0);
    return beta;
  }

  /// Extends the basis by one vector. Returns ||w||_2 of the unnormalized new
  /// direction (|h_{j+1,j}| ||q_{j+1}||_2) and sets `invariant` on breakdown.
  double step(int j, bool& invariant)
  {
    Vector& w = ws_.basis[static_cast<std::size_t>(j) + 1];
    w.resize(static_cast<std::size_t>(A_.rows()));
    const Vector& qj = ws_.basis[static_cast<std::size_t>(j)];
    kernels::spmv(A_, qj, w);
    ++spmv_count_;
    const double qnorm = basis_ == KrylovBasis::lanczos ? kernels::norm2(qj) : 1.0;

    double wnorm = -1.0;
    if (basis_ == KrylovBasis::arnoldi) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Vector& qi = ws_.basis[static_cast<std::size_t>(i)];
          const Complex hij = kernels::dot_conj(qi, w);
          H_(i, j) += hij;
          kernels::axpy(-hij, qi, w);
        }
      }
    }
    else if (basis_ == KrylovBasis::incomplete) {
      // The window vectors are mutually orthogonal, so classical Gram-Schmidt
      // in two fused sweeps matches the modified form at half the traffic.
      const int first = std::max(0, j + 1 - opts_.window);
      window_ptrs_.clear();
      for (int i = first; i <= j; ++i) window_ptrs_.push_back(ws_.basis[static_cast<std::size_t>(i)].data());
      window_h_.resize(window_ptrs_.size());
      kernels::dot_conj_many(window_ptrs_, w, window_h_);
      for (int i = first; i <= j; ++i) H_(i, j) = window_h_[static_cast<std::size_t>(i - first)];
      wnorm = kernels::subtract_combination(window_ptrs_, window_h_, w);
    }
    else {
      if (j > 0) {
        const Complex beta = H_(j, j - 1);
        kernels::axpy(-beta, ws_.basis[static_cast<std::size_t>(j) - 1], w);
        H_(j - 1, j) = beta;
      }
      for (int pass = 0; pass < 2; ++pass) {
        const Complex alpha = kernels::dot_weighted(qj, weight_, w);
        H_(j, j) += alpha;
        kernels::axpy(-alpha, qj, w);
      }
    }

    if (wnorm < 0.0) wnorm = kernels::norm2(w);
    if (wnorm <= 1e-13 * anorm_ * qnorm) {
      invariant = true;
      H_(j + 1, j) = 0.0;
      return 0.0;
    }
    if (basis_ != KrylovBasis::lanczos) {
      H_(j + 1, j) = wnorm;
      kernels::scale(1.0 / wnorm, w);
    }
    else {
      const Complex bb = kernels::dot_weighted(w, weight_, w);
      if (std::abs(bb) <= 1e-10 * wnorm * wnorm * max_weight()) {
        // Near-breakdown: the space built so far stays usable, only the
        // recurrence cannot continue.
        stalled_ = true;
        return wnorm;
      }
      const Complex beta = std::sqrt(bb);
      H_(j + 1, j) = beta;
      kernels::scale(1.0 / beta, w);
    }
    return wnorm;
  }

  const DenseMatrix& hess() const { return H_; }
  bool stalled() const { return stalled_; }

  /// z = sum_i y_i basis[i]
  void combine(const DenseVector& y, Vector& z) const
  {
    kernels::fill_zero(z);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      kernels::axpy(y(i), ws_.basis[static_cast<std::size_t>(i)], z);
    }
  }

private:
  int& spmv_count_;
  double max_weight()
  {
    if (max_weight_ < 0.0) {
      max_weight_ = 0.0;
      for (const Complex& w : weight_) {
        max_weight_ = std::max(max_weight_, std::abs(w));
      }
    }
    return max_weight_;
  }

  const CsrMatrix& A_;
  const PsiActionOptions& opts_;
  ArnoldiWorkspace& ws_;
  double anorm_;
  int cap_;
  KrylovBasis basis_;
  DenseMatrix H_;
  std::span<const Complex> weight_;
  Vector ones_;
  double max_weight_ = -1.0;
  bool stalled_ = false;
  std::vector<const Complex*> window_ptrs_;
  std::vector<Complex> window_h_;
};

struct Projection
{
  DenseMatrix cols;  // psi_k(X) e1 for k = 0..l+1
  double est = 0.0;
};

// Projected evaluation at substep dt over a Krylov space of dimension m.
Projection project(const DenseMatrix& H, int m, double t, double dt, int l, Complex beta,
                   double wnorm)
{
  const DenseMatrix X = Complex(0.0, t * dt) * H.topLeftCorner(m, m);
  Projection p;
  p.cols = psi_columns(X, l + 1);
  const double tail = std::max(std::abs(p.cols(m - 1, l)), std::abs(p.cols(m - 1, l + 1)));
  p.est = std::pow(dt, l) * std::abs(beta) * t * dt * wnorm * tail;
  return p;
}

}  // namespace

PsiActionResult psi_action(int l, const CsrMatrix& A, double t, const Vector& v,
                           const PsiActionOptions& opts)
{
  if (l < 0 || l > 2) {
    throw DomainError("psi_action: l must be 0, 1 or 2");
  }
  if (A.rows() != A.cols()) {
    throw DimensionError("psi_action: matrix must be square");
  }
  if (v.size() != static_cast<std::size_t>(A.rows())) {
    throw DimensionError("psi_action: vector length " + std::to_string(v.size()) +
                         " does not match matrix order " + std::to_string(A.rows()));
  }
  if (!(t > 0.0)) {
    throw DomainError("psi_action: t must be positive");
  }
  if (!(opts.tol > 1e-14 && opts.tol < 1e-1)) {
    throw DomainError("psi_action: tol must lie in (1e-14, 1e-1)");
  }
  if (opts.max_dim < 1 || opts.max_substeps < 1 || opts.window < 1) {
    throw DomainError("psi_action: max_dim, max_substeps and window must be positive");
  }
  if (opts.basis == KrylovBasis::lanczos && !opts.weight.empty() &&
      opts.weight.size() != v.size()) {
    throw DimensionError("psi_action: weight length does not match matrix order");
  }

  const std::size_t n = v.size();
  PsiActionResult res;
  res.w.assign(n, 0.0);
  const double vnorm = kernels::norm2(v);
  if (vnorm == 0.0) {
    return res;
  }
  const double anorm = opts.norm_estimate > 0.0 ? opts.norm_estimate : A.max_abs_row_sum();

  ArnoldiWorkspace local;
  ArnoldiWorkspace& ws = opts.workspace != nullptr ? *opts.workspace : local;
  const std::size_t budget_dim = opts.memory_budget / (sizeof(Complex) * std::max<std::size_t>(n, 1));
  int cap = std::min<int>(opts.max_dim, static_cast<int>(n));
  cap = std::max(1, std::min<int>(cap, static_cast<int>(std::min<std::size_t>(budget_dim, 1u << 20)) - 1));
  ws.max_dim = cap;

  const Complex it(0.0, t);
  Vector& u = res.w;
  if (l == 0) {
    kernels::copy(v, u);
  }
  Vector p(l == 2 ? n : 0);
  Vector q(n);
  Vector z(n);
  double sigma = 0.0;
  KrylovBasis basis = opts.basis;

  while (sigma < 1.0) {
    if (res.substeps >= opts.max_substeps) {
      throw PsiActionError("psi_action: no convergence within " +
                             std::to_string(opts.max_substeps) + " substeps (reached sigma = " +
                             std::to_string(sigma) + ")",
                           res);
    }
    const double remaining = 1.0 - sigma;

    // Start vector of this cycle (see the ODE form in the header).
    if (l == 0) {
      kernels::copy(u, q);
    }
    else if (sigma == 0.0) {
      kernels::copy(v, q);
      if (l == 2) kernels::fill_zero(p);
    }
    else if (l == 1) {
      kernels::spmv(A, u, q);
      ++res.spmv_count;
      kernels::scale(it, q);
      kernels::axpy(1.0, v, q);
    }
    else {
      kernels::spmv(A, u, p);
      ++res.spmv_count;
      kernels::scale(it, p);
      kernels::axpy(sigma, v, p);
      kernels::spmv(A, p, q);
      ++res.spmv_count;
      kernels::scale(it, q);
      kernels::axpy(1.0, v, q);
    }

    const double qnorm = kernels::norm2(q);
    if (qnorm == 0.0) {
      // The state is stationary apart from the polynomial part.
      if (l == 2) kernels::axpy(remaining, p, u);
      sigma = 1.0;
      ++res.substeps;
      break;
    }

    try {
      KrylovCycle cycle(A, opts, ws, anorm, cap, basis, res.spmv_count);
      const Complex beta = cycle.start(q);
      const double target = opts.tol * vnorm;
      int m = 0;
      double dt = remaining;
      Projection proj;
      bool accepted = false;
      double last_wnorm = 0.0;
      int next_check = std::clamp(ws.check_from, 1, cap);
      int prev_m = 0;
      double prev_est = 0.0;
      for (int j = 0; j < cap; ++j) {
        bool invariant = false;
        last_wnorm = cycle.step(j, invariant);
        m = j + 1;
        if (invariant) {
          proj = project(cycle.hess(), m, t, dt, l, beta, 0.0);
          accepted = true;
          break;
        }
        if (cycle.stalled()) {
          proj = project(cycle.hess(), m, t, dt, l, beta, last_wnorm);
          accepted = proj.est <= target * dt;
          break;
        }
        if (m < next_check && m < cap) {
          continue;
        }
        proj = project(cycle.hess(), m, t, dt, l, beta, last_wnorm);
        if (proj.est <= target * dt) {
          accepted = true;
          break;
        }
        // Each check costs a dense exponential of order m. The next one goes
        // where the log-linear trend of the last two estimates meets the
        // target, at most m/8 steps ahead.
        int jump = std::max(1, m / 8);
        if (prev_m > 0 && proj.est > 0.0 && prev_est > proj.est) {
          const double rate = std::log(prev_est / proj.est) / (m - prev_m);
          const double need = std::log(proj.est / (target * dt)) / rate;
          jump = std::clamp(static_cast<int>(std::ceil(need)), 1, jump);
        }
        prev_m = m;
        prev_est = proj.est;
        next_check = m + jump;
      }
      res.max_krylov_dim = std::max(res.max_krylov_dim, m);

      if (accepted && m < cap && !cycle.stalled()) {
        ws.check_from = std::max(1, m - 3);
      }
      else if (!accepted) {
        // Largest substep meeting the per-unit-time target on this space.
        double lo = 0.0;
        double hi = remaining;
        Projection lo_proj;
        for (int halvings = 0; halvings < 60; ++halvings) {
          const double trial = hi * 0.5;
          Projection pr = project(cycle.hess(), m, t, trial, l, beta, last_wnorm);
          if (pr.est <= target * trial) {
            lo = trial;
            lo_proj = std::move(pr);
            break;
          }
          hi = trial;
        }
        if (lo == 0.0 && cycle.stalled()) {
          throw LanczosBreakdown{};
        }
        if (lo == 0.0) {
          throw PsiActionError("psi_action: substep underflow at sigma = " + std::to_string(sigma),
                               res);
        }
        for (int refine = 0; refine < 6; ++refine) {
          const double mid = 0.5 * (lo + hi);
          Projection pr = project(cycle.hess(), m, t, mid, l, beta, last_wnorm);
          if (pr.est <= target * mid) {
            lo = mid;
            lo_proj = std::move(pr);
          }
          else {
            hi = mid;
          }
        }
        dt = lo;
        proj = std::move(lo_proj);
        if (!cycle.stalled()) ws.check_from = cap;
      }

      const Complex coef = beta * std::pow(dt, l);
      const DenseVector y = coef * proj.cols.col(l);
      cycle.combine(y, z);
      ws.hess = cycle.hess().topLeftCorner(m, m);
      if (l == 0) {
        kernels::copy(z, u);
      }
      else {
        if (l == 2) kernels::axpy(dt, p, u);
        kernels::axpy(1.0, z, u);
      }
      res.est_error += proj.est;
      sigma = (remaining - dt <= 1e-14) ? 1.0 : sigma + dt;
      ++res.substeps;
      basis = opts.basis;
    }
    catch (const LanczosBreakdown&) {
      // Redo this cycle with a full orthogonal basis.
      basis = KrylovBasis::arnoldi;
    }
  }
  return res;
}

PsiActionResult psi_action(int l, const CsrMatrix& A, double t, const Vector& v, double tol)
{
  PsiActionOptions opts;
  opts.tol = tol;
  return psi_action(l, A, t, v, opts);
}

}  // namespace matexpre
