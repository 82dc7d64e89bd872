// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_SPECTRAL_HPP
#define MATEXPRE_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "matexpre/dense.hpp"
#include "matexpre/error.hpp"

namespace matexpre
{

inline constexpr Eigen::Index dense_eig_max_dim = 4000;

/// QR iteration stopped early; carries the eigenvalues deflated so far.
class EigenvalueError : public ConvergenceError
{
public:
  EigenvalueError(const std::string& what, std::vector<Complex> converged)
    : ConvergenceError(what), converged_(std::move(converged))
  {
  }
  const std::vector<Complex>& converged() const { return converged_; }

private:
  std::vector<Complex> converged_;
};

/// All eigenvalues of a square complex matrix: diagonal balancing, Householder
/// reduction to Hessenberg form, then complex single-shift QR with Wilkinson
/// shifts and an exceptional shift every 20 sweeps without deflation.
/// Sorted by ascending real part, ties by imaginary part.
std::vector<Complex> dense_eig(const DenseMatrix& M);

/// Sorts ascending by real part, then imaginary part.
void sort_eigenvalues(std::vector<Complex>& values);

struct SpectrumReport
{
  std::vector<Complex> eigenvalues;
  double min_imag = 0.0;  ///< min_k Im(eigenvalues[k])
  double scaled_by = 1.0; ///< eigenvalues are the raw ones divided by this
  double max_dist_from_one = 0.0;  ///< max_k |eigenvalues[k] - 1|
};

SpectrumReport make_report(std::vector<Complex> eigenvalues, double scaled_by = 1.0);

/// One 1D PML eigenvalue configuration on the inner interval [0, length]
/// with unit wave speed. The layer is `thickness_points` cells when set,
/// otherwise round(width / h) cells (at least one).
struct PmlSpectrumSpec
{
  double freq = 10.0;
  double ppw = 10.0;
  std::optional<int> thickness_points;
  double width = 0.0;
  double c_pml = 20.0;
  double length = 1.0;
  /// Divide eigenvalues (and min_imag) by omega^2.
  bool normalize = false;

  /// The layer is one unit-speed wavelength, ppw cells.
  static PmlSpectrumSpec one_wavelength(double freq, double ppw, double c_pml);
};

SpectrumReport pml_spectrum(const PmlSpectrumSpec& spec);

struct SweepRow
{
  PmlSpectrumSpec spec;
  int thickness_points = 0;
  int unknowns = 0;
  double min_imag = 0.0;
};

/// min_imag for each configuration, in input order.
std::vector<SweepRow> min_imag_sweep(const std::vector<PmlSpectrumSpec>& points);

/// P_N = -i t (sum_{n=0}^{N} exp(i t A)^n) psi_1(i t A), formed densely.
DenseMatrix truncated_inverse_dense(const DenseMatrix& A, double t, int N);

/// Eigenvalues of P_N A with the distance to one.
SpectrumReport preconditioned_spectrum(const DenseMatrix& A, double t, int N);

}  // namespace matexpre

#endif  // MATEXPRE_SPECTRAL_HPP
