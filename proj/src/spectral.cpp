// SPDX-License-Identifier: Apache-2.0

#include "matexpre/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "matexpre/discretization.hpp"
#include "matexpre/matfunc.hpp"

namespace matexpre
{

namespace
{

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Diagonal similarity by powers of two equalizing row and column 1-norms.
void balance(DenseMatrix& H)
{
  const Eigen::Index n = H.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs1(H(j, i));
        r += abs1(H(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        H.row(i) /= f;
        H.col(i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (similarity only).
void hessenberg(DenseMatrix& H)
{
  const Eigen::Index n = H.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    DenseVector x = H.block(k + 1, k, len, 1);
    const double xnorm = x.norm();
    if (xnorm == 0.0) continue;
    const Complex x0 = x(0);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    DenseVector v = x;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // H <- (I - 2 v v^*) H (I - 2 v v^*)
    auto rows = H.block(k + 1, 0, len, n);
    const Eigen::RowVectorXcd left = v.adjoint() * rows;
    rows.noalias() -= 2.0 * v * left;
    auto cols = H.block(0, k + 1, n, len);
    const DenseVector right = cols * v;
    cols.noalias() -= 2.0 * right * v.adjoint();
    H.block(k + 2, k, len - 1, 1).setZero();
    H(k + 1, k) = alpha;
  }
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d)
{
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex mu1 = 0.5 * (a + d) + disc;
  const Complex mu2 = 0.5 * (a + d) - disc;
  return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

}  // namespace

void sort_eigenvalues(std::vector<Complex>& values)
{
  std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

std::vector<Complex> dense_eig(const DenseMatrix& M)
{
  if (M.rows() != M.cols()) {
    throw DimensionError("dense_eig: matrix must be square");
  }
  if (M.rows() > dense_eig_max_dim) {
    throw DimensionError("dense_eig: order " + std::to_string(M.rows()) + " exceeds the cap " +
                         std::to_string(dense_eig_max_dim));
  }
  if (!M.allFinite()) {
    throw DomainError("dense_eig: non-finite matrix entries");
  }
  const Eigen::Index n = M.rows();
  std::vector<Complex> eig(static_cast<std::size_t>(n));
  if (n == 0) return eig;

  DenseMatrix H = M;
  balance(H);
  hessenberg(H);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(H.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const long max_sweeps = 40L * n;
  long sweeps = 0;
  int since_deflation = 0;
  Eigen::Index hi = n - 1;
  std::vector<double> cs(static_cast<std::size_t>(n));
  std::vector<Complex> sn(static_cast<std::size_t>(n));

  while (hi >= 0) {
    if (hi == 0) {
      eig[0] = H(0, 0);
      break;
    }
    Eigen::Index lo = hi;
    while (lo > 0) {
      const double scale = abs1(H(lo, lo)) + abs1(H(lo - 1, lo - 1));
      const double tiny = eps * (scale == 0.0 ? hnorm : scale);
      if (abs1(H(lo, lo - 1)) <= tiny) {
        H(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[static_cast<std::size_t>(hi)] = H(hi, hi);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (sweeps >= max_sweeps) {
      std::vector<Complex> done(eig.begin() + hi + 1, eig.end());
      throw EigenvalueError("dense_eig: QR iteration did not converge after " +
                              std::to_string(sweeps) + " sweeps; " + std::to_string(done.size()) +
                              " eigenvalues converged",
                            std::move(done));
    }
    ++sweeps;
    ++since_deflation;

    Complex mu;
    if (since_deflation % 20 == 0) {
      mu = H(hi, hi) + 0.75 * std::abs(H(hi, hi - 1).real()) +
           Complex(0.0, 0.75 * std::abs(H(hi, hi - 1).imag()));
    }
    else {
      mu = wilkinson_shift(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
    }

    // Explicit shifted QR step on the active block [lo, hi].
    for (Eigen::Index k = lo; k <= hi; ++k) H(k, k) -= mu;
    for (Eigen::Index k = lo; k < hi; ++k) {
      const Complex a = H(k, k);
      const Complex b = H(k + 1, k);
      const double r = std::hypot(std::abs(a), std::abs(b));
      double c = 1.0;
      Complex s = 0.0;
      if (r != 0.0) {
        if (std::abs(a) == 0.0) {
          c = 0.0;
          s = std::conj(b) / std::abs(b);
        }
        else {
          c = std::abs(a) / r;
          s = (a / std::abs(a)) * std::conj(b) / r;
        }
      }
      cs[static_cast<std::size_t>(k)] = c;
      sn[static_cast<std::size_t>(k)] = s;
      for (Eigen::Index j = k; j <= hi; ++j) {
        const Complex x = H(k, j);
        const Complex y = H(k + 1, j);
        H(k, j) = c * x + s * y;
        H(k + 1, j) = -std::conj(s) * x + c * y;
      }
    }
    for (Eigen::Index k = lo; k < hi; ++k) {
      const double c = cs[static_cast<std::size_t>(k)];
      const Complex s = sn[static_cast<std::size_t>(k)];
      const Eigen::Index last = std::min(k + 1, hi);
      for (Eigen::Index i = lo; i <= last; ++i) {
        const Complex x = H(i, k);
        const Complex y = H(i, k + 1);
        H(i, k) = c * x + std::conj(s) * y;
        H(i, k + 1) = -s * x + c * y;
      }
    }
    for (Eigen::Index k = lo; k <= hi; ++k) H(k, k) += mu;
  }
  sort_eigenvalues(eig);
  return eig;
}

SpectrumReport make_report(std::vector<Complex> eigenvalues, double scaled_by)
{
  SpectrumReport rep;
  rep.scaled_by = scaled_by;
  if (scaled_by != 1.0) {
    for (Complex& z : eigenvalues) z /= scaled_by;
  }
  sort_eigenvalues(eigenvalues);
  rep.min_imag = std::numeric_limits<double>::infinity();
  for (const Complex& z : eigenvalues) {
    rep.min_imag = std::min(rep.min_imag, z.imag());
    rep.max_dist_from_one = std::max(rep.max_dist_from_one, std::abs(z - 1.0));
  }
  if (eigenvalues.empty()) rep.min_imag = 0.0;
  rep.eigenvalues = std::move(eigenvalues);
  return rep;
}

PmlSpectrumSpec PmlSpectrumSpec::one_wavelength(double freq, double ppw, double c_pml)
{
  PmlSpectrumSpec s;
  s.freq = freq;
  s.ppw = ppw;
  s.thickness_points = static_cast<int>(std::lround(ppw));
  s.c_pml = c_pml;
  return s;
}

namespace
{

Grid spectrum_grid(const PmlSpectrumSpec& spec)
{
  if (!(spec.freq > 0.0) || !(spec.ppw > 0.0) || !(spec.length > 0.0)) {
    throw DomainError("pml_spectrum: freq, ppw and length must be positive");
  }
  const double h_target = 1.0 / (spec.freq * spec.ppw);
  const int cells = std::max(2, static_cast<int>(std::lround(spec.length / h_target)));
  const double h = spec.length / cells;
  PmlConfig pml;
  pml.c_pml = spec.c_pml;
  if (spec.thickness_points) {
    pml.thickness_points = *spec.thickness_points;
  }
  else {
    if (!(spec.width > 0.0)) {
      throw DomainError("pml_spectrum: need thickness_points or a positive width");
    }
    pml.thickness_points = std::max(1, static_cast<int>(std::lround(spec.width / h)));
  }
  pml.validate();
  return Grid::from_cells(1, {cells, 1, 1}, h, 2.0 * std::numbers::pi * spec.freq, pml);
}

}  // namespace

SpectrumReport pml_spectrum(const PmlSpectrumSpec& spec)
{
  const Grid grid = spectrum_grid(spec);
  if (static_cast<Eigen::Index>(grid.unknowns()) > dense_eig_max_dim) {
    throw DimensionError("pml_spectrum: " + std::to_string(grid.unknowns()) +
                         " unknowns exceed the dense eigensolver cap");
  }
  const HelmholtzSystem sys = assemble(grid, VelocityModel::homogeneous(grid));
  return make_report(dense_eig(to_dense(sys.A)),
                     spec.normalize ? grid.omega * grid.omega : 1.0);
}

std::vector<SweepRow> min_imag_sweep(const std::vector<PmlSpectrumSpec>& points)
{
  std::vector<SweepRow> rows(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Grid grid = spectrum_grid(points[k]);
    const SpectrumReport rep = pml_spectrum(points[k]);
    rows[k].spec = points[k];
    rows[k].thickness_points = grid.pml.thickness_points;
    rows[k].unknowns = static_cast<int>(grid.unknowns());
    rows[k].min_imag = rep.min_imag;
  }
  return rows;
}

DenseMatrix truncated_inverse_dense(const DenseMatrix& A, double t, int N)
{
  if (A.rows() != A.cols()) throw DimensionError("truncated_inverse_dense: matrix must be square");
  if (N < 0) throw DomainError("truncated_inverse_dense: N must be nonnegative");
  if (!(t > 0.0)) throw DomainError("truncated_inverse_dense: t must be positive");
  const DenseMatrix X = Complex(0.0, t) * A;
  const DenseMatrix E = dense_exp(X);
  const DenseMatrix P1 = psi_dense(1, X);
  const Eigen::Index n = A.rows();
  DenseMatrix S = DenseMatrix::Identity(n, n);
  for (int k = 0; k < N; ++k) {
    S = DenseMatrix::Identity(n, n) + E * S;
  }
  return Complex(0.0, -t) * (S * P1);
}

SpectrumReport preconditioned_spectrum(const DenseMatrix& A, double t, int N)
{
  const DenseMatrix PA = truncated_inverse_dense(A, t, N) * A;
  return make_report(dense_eig(PA));
}

}  // namespace matexpre
