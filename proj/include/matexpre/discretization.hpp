// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_DISCRETIZATION_HPP
#define MATEXPRE_DISCRETIZATION_HPP

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "matexpre/sparse.hpp"

namespace matexpre
{

/// Quadratic complex-stretching profile of the absorbing layer.
struct PmlConfig
{
  int thickness_points = 10;  ///< layer width in mesh cells, per side
  double c_pml = 20.0;        ///< absorption strength

  void validate() const;
};

/// Closed interval of one axis of the inner (physical) domain.
struct Interval
{
  double lo = 0.0;
  double hi = 1.0;
};

/// Stretching factor s(x) at coordinate x for an axis whose inner interval is
/// `inner`, padded by a layer of width `delta` on both sides. Equals one
/// inside the interval and 1 + i c_pml/(delta omega) (depth/delta)^2 in the
/// layers. Throws DomainError for x outside [lo - delta, hi + delta].
Complex pml_stretch(double x, Interval inner, const PmlConfig& pml, double delta, double omega);

/// Uniform structured grid of the inner domain plus absorbing padding.
///
/// Along each axis, nodes sit at lo - delta + (k+1) h for k in
/// [0, axis_points); the outer nodes at lo - delta and hi + delta carry
/// homogeneous Dirichlet values and are eliminated. `inner_points` counts
/// nodes strictly inside (lo, hi); each layer contributes thickness_points
/// nodes, the interval endpoints included. A grid accepts a zero-width layer
/// (plain Dirichlet problem) even though PmlConfig::validate rejects it.
struct Grid
{
  int dim = 2;
  std::array<int, 3> inner_points{1, 1, 1};
  std::array<Interval, 3> extent{};
  double h = 0.0;
  PmlConfig pml{};
  double omega = 0.0;
  double ppw = 0.0;  ///< 2 pi / (omega h): points per wavelength at unit speed

  /// Grid on [0, L_0] x ... with L = `lengths`, sized so that h = 1/(freq ppw)
  /// (rounded so each length is a whole number of cells). Without an explicit
  /// `pml`, the layer is one unit-speed wavelength, round(ppw) points, with
  /// c_pml = 20.
  static Grid for_frequency(int dim, double freq, double ppw, std::optional<PmlConfig> pml = {},
                            std::array<double, 3> lengths = {1.0, 1.0, 1.0});

  /// Grid from an explicit cell count per axis and spacing; lo = 0.
  static Grid from_cells(int dim, std::array<int, 3> cells, double h, double omega,
                         PmlConfig pml);

  double freq() const;
  double delta() const { return pml.thickness_points * h; }
  int axis_points(int axis) const;
  std::size_t unknowns() const;
  /// Coordinate of node k along `axis`.
  double coordinate(int axis, int k) const;
  /// Lexicographic index with the x index fastest.
  std::size_t index(std::array<int, 3> ijk) const;

  void validate() const;
};

/// Wave speed per grid node (inner and absorbing layers) in lexicographic
/// order, or a raw model with its own `dims` before it is fitted to a grid.
struct VelocityModel
{
  std::vector<double> values;
  std::array<int, 3> dims{1, 1, 1};
  double c_min = 0.0;
  double c_max = 0.0;
  double scale_factor = 1.0;  ///< original = stored * scale_factor when rescaled

  /// Computes extrema; throws DomainError on non-finite or nonpositive values.
  static VelocityModel from_values(std::vector<double> values, std::array<int, 3> dims);

  static VelocityModel homogeneous(const Grid& grid, double c = 1.0);

  /// c(x) = 1 - 1/2 exp(-|x - center|^2 / (2 sigma^2)).
  static VelocityModel converging_lens(const Grid& grid, std::array<double, 3> center,
                                       double sigma);

  std::size_t size() const { return values.size(); }
};

/// Rescales speeds so that c_min becomes one; records the factor.
VelocityModel normalize_min_speed(const VelocityModel& model);

/// Assembled discrete Helmholtz operator on a grid.
///
/// A = omega^2 diag(D) + L_pml where L_pml is the stretched Laplacian with
/// the outer Dirichlet nodes eliminated. `symmetrizer` holds the product of
/// the per-axis node stretch factors; diag(symmetrizer) * A is complex
/// symmetric.
struct HelmholtzSystem
{
  CsrMatrix A;
  Vector D;
  Vector symmetrizer;
  Grid grid;

  std::size_t size() const { return D.size(); }
};

HelmholtzSystem assemble(const Grid& grid, const VelocityModel& model);

/// A_s = A + i omega^2 s diag(D); same sparsity as A.
CsrMatrix apply_shift(const HelmholtzSystem& sys, double s);

struct DeltaSource
{
  std::array<double, 3> location{0.5, 0.5, 0.5};
};

struct GaussianPole
{
  std::array<double, 3> center{};
  double radius = 0.0;
  double sign = 1.0;
};

struct GaussianSumSource
{
  std::vector<GaussianPole> poles;
};

using SourceSpec = std::variant<DeltaSource, GaussianSumSource>;

/// Delta: a single entry 1/h^dim at the node nearest the location (which must
/// lie in the inner domain). Gaussian sum: nodal samples of
/// sum sign (2 pi r^2)^(-dim/2) exp(-|x - c|^2 / (2 r^2)).
Vector build_source(const Grid& grid, const SourceSpec& spec);

/// The signed pole pairs, 6h apart from the domain centre along each axis,
/// with radius 3h (one pair in 2D along x, three pairs in 3D).
GaussianSumSource paired_gaussian_source(const Grid& grid);

/// Delta at the centre of the inner domain.
DeltaSource centered_delta(const Grid& grid);

}  // namespace matexpre

#endif  // MATEXPRE_DISCRETIZATION_HPP
