// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>
#include <random>

#include "matexpre/dense.hpp"
#include "matexpre/discretization.hpp"
#include "matexpre/error.hpp"
#include "matexpre/sparse.hpp"
#include "oracles.hpp"

namespace
{

using namespace matexpre;
constexpr double pi = std::numbers::pi;

// Stretch written out from the profile definition, independent of pml_stretch.
Complex stretch_ref(double x, double lo, double hi, double delta, double c_pml, double omega)
{
  double d = 0.0;
  if (x < lo) d = (lo - x) / delta;
  if (x > hi) d = (x - hi) / delta;
  return {1.0, c_pml / (delta * omega) * d * d};
}

// (A u) evaluated node by node from the divergence-form stencil with
// half-point fluxes; outer Dirichlet values are zero.
Vector apply_stencil_ref(const Grid& g, const std::vector<double>& c, const Vector& u)
{
  const int nx = g.axis_points(0);
  const int ny = g.axis_points(1);
  const int nz = g.axis_points(2);
  const double d = g.delta();
  Vector out(u.size(), 0.0);
  auto at = [&](int i, int j, int k) -> Complex {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return 0.0;
    return u[static_cast<std::size_t>((k * ny + j) * nx + i)];
  };
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t row = static_cast<std::size_t>((k * ny + j) * nx + i);
        Complex acc = g.omega * g.omega / (c[row] * c[row]) * at(i, j, k);
        const std::array<int, 3> ijk{i, j, k};
        for (int a = 0; a < g.dim; ++a) {
          const double x = g.extent[a].lo - d + (ijk[a] + 1) * g.h;
          const auto s = [&](double y) {
            return stretch_ref(y, g.extent[a].lo, g.extent[a].hi, d, g.pml.c_pml, g.omega);
          };
          std::array<int, 3> up = ijk;
          std::array<int, 3> dn = ijk;
          ++up[a];
          --dn[a];
          const Complex uc = at(i, j, k);
          const Complex flux_up = (at(up[0], up[1], up[2]) - uc) / s(x + 0.5 * g.h);
          const Complex flux_dn = (uc - at(dn[0], dn[1], dn[2])) / s(x - 0.5 * g.h);
          acc += (flux_up - flux_dn) / (s(x) * g.h * g.h);
        }
        out[row] = acc;
      }
    }
  }
  return out;
}

TEST(PmlStretch, ProfileValues)
{
  const PmlConfig pml{5, 20.0};
  const Interval iv{0.0, 1.0};
  const double delta = 0.1;
  const double omega = 2.0 * pi * 10.0;
  EXPECT_EQ(pml_stretch(0.3, iv, pml, delta, omega), Complex(1.0));
  EXPECT_EQ(pml_stretch(1.0, iv, pml, delta, omega), Complex(1.0));
  const Complex full = pml_stretch(-delta, iv, pml, delta, omega);
  EXPECT_DOUBLE_EQ(full.real(), 1.0);
  EXPECT_NEAR(full.imag(), 20.0 / (delta * omega), 1e-14);
  for (int k = 0; k <= 20; ++k) {
    const double depth = delta * k / 20.0;
    EXPECT_LT(std::abs(pml_stretch(1.0 + depth, iv, pml, delta, omega) -
                       pml_stretch(-depth, iv, pml, delta, omega)),
              1e-13);
  }
  EXPECT_THROW(pml_stretch(1.2, iv, pml, delta, omega), DomainError);
}

TEST(Grid, ForFrequencySizes)
{
  // 2D freq 40 ppw 10: h = 1/400, 399 inner points and a 10-point layer.
  const Grid g = Grid::for_frequency(2, 40.0, 10.0);
  EXPECT_DOUBLE_EQ(g.h, 1.0 / 400.0);
  EXPECT_EQ(g.axis_points(0), 419);
  EXPECT_EQ(g.axis_points(1), 419);
  EXPECT_EQ(g.axis_points(2), 1);
  EXPECT_EQ(g.pml.thickness_points, 10);
  EXPECT_EQ(g.unknowns(), 419u * 419u);

  const Grid g3 = Grid::for_frequency(3, 10.0, 10.0);
  EXPECT_EQ(g3.unknowns(), 119u * 119u * 119u);

  const Grid fine = Grid::for_frequency(2, 40.0, 20.0, PmlConfig{20, 20.0});
  EXPECT_EQ(fine.axis_points(0), 839);
}

TEST(Grid, Invariants)
{
  for (int dim = 1; dim <= 3; ++dim) {
    for (double freq : {3.0, 7.5, 20.0}) {
      for (double ppw : {8.0, 10.0, 15.0}) {
        const Grid g = Grid::for_frequency(dim, freq, ppw);
        for (int a = 0; a < dim; ++a) {
          EXPECT_EQ(g.axis_points(a), g.inner_points[a] + 2 * g.pml.thickness_points);
        }
        EXPECT_NEAR(2.0 * pi / (g.omega * g.h), g.ppw, 1e-12 * g.ppw);
        EXPECT_NEAR(g.freq(), freq, 1e-12 * freq);
        // The first and last nodes sit one cell inside the Dirichlet walls.
        EXPECT_NEAR(g.coordinate(0, 0), -g.delta() + g.h, 1e-14);
        EXPECT_NEAR(g.coordinate(0, g.axis_points(0) - 1), g.extent[0].hi + g.delta() - g.h,
                    1e-12);
      }
    }
  }
}

TEST(VelocityModel, ExtremaAndValidation)
{
  const VelocityModel m = VelocityModel::from_values({2.0, 0.5, 3.0, 1.0}, {4, 1, 1});
  EXPECT_EQ(m.c_min, 0.5);
  EXPECT_EQ(m.c_max, 3.0);
  EXPECT_THROW(VelocityModel::from_values({1.0, 0.0}, {2, 1, 1}), DomainError);
  EXPECT_THROW(VelocityModel::from_values({1.0, -1.0}, {2, 1, 1}), DomainError);
  EXPECT_THROW(VelocityModel::from_values({1.0, std::nan("")}, {2, 1, 1}), DomainError);

  const VelocityModel n = normalize_min_speed(VelocityModel::from_values({1.5, 3.0}, {2, 1, 1}));
  EXPECT_DOUBLE_EQ(n.c_min, 1.0);
  EXPECT_DOUBLE_EQ(n.values[1], 2.0);
  EXPECT_DOUBLE_EQ(n.scale_factor, 1.5);
}

TEST(VelocityModel, LensIsSlowAtCentre)
{
  const Grid g = Grid::for_frequency(2, 10.0, 10.0);
  const VelocityModel m = VelocityModel::converging_lens(g, {0.5, 0.1, 0.5}, 1.0 / 32.0);
  EXPECT_LT(m.c_min, 0.51);
  EXPECT_GE(m.c_min, 0.5);
  EXPECT_NEAR(m.c_max, 1.0, 1e-12);
  const int i = static_cast<int>(std::lround(0.5 / g.h)) + g.pml.thickness_points - 1;
  const int j = static_cast<int>(std::lround(0.1 / g.h)) + g.pml.thickness_points - 1;
  EXPECT_NEAR(m.values[g.index({i, j, 0})], 0.5, 1e-12);
}

TEST(Assemble, InteriorRowIsThreePointStencil)
{
  const Grid g = Grid::for_frequency(1, 10.0, 10.0);
  const HelmholtzSystem sys = assemble(g, VelocityModel::homogeneous(g));
  const Index mid = static_cast<Index>(g.axis_points(0) / 2);
  const double h2 = g.h * g.h;
  EXPECT_NEAR(std::abs(sys.A.at(mid, mid - 1) - 1.0 / h2), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sys.A.at(mid, mid + 1) - 1.0 / h2), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sys.A.at(mid, mid) - (g.omega * g.omega - 2.0 / h2)), 0.0, 1e-8);
}

TEST(Assemble, MatchesIndependentStencilEvaluator)
{
  std::mt19937_64 rng(31);
  // 20-point 1D grid plus small 2D and 3D grids with a heterogeneous medium.
  const std::vector<Grid> grids{
    Grid::from_cells(1, {15, 1, 1}, 1.0 / 15.0, 2.0 * pi * 2.0, PmlConfig{3, 20.0}),
    Grid::from_cells(2, {9, 7, 1}, 1.0 / 9.0, 2.0 * pi * 1.5, PmlConfig{2, 12.0}),
    Grid::from_cells(3, {5, 6, 4}, 0.2, 2.0 * pi, PmlConfig{2, 30.0}),
  };
  ASSERT_EQ(grids[0].unknowns(), 20u);
  std::uniform_real_distribution<double> speed(0.7, 2.0);
  for (const Grid& g : grids) {
    std::vector<double> c(g.unknowns());
    for (double& x : c) x = speed(rng);
    const VelocityModel model = VelocityModel::from_values(
      c, {g.axis_points(0), g.axis_points(1), g.axis_points(2)});
    const HelmholtzSystem sys = assemble(g, model);
    ASSERT_EQ(static_cast<std::size_t>(sys.A.rows()), g.unknowns());
    for (int trial = 0; trial < 20; ++trial) {
      const Vector u = oracle::random_vector(g.unknowns(), rng);
      EXPECT_LT(oracle::rel_err(spmv(sys.A, u), apply_stencil_ref(g, c, u)), 1e-13)
        << "dim " << g.dim;
    }
    for (std::size_t i = 0; i < sys.D.size(); ++i) {
      EXPECT_EQ(sys.D[i].imag(), 0.0);
      EXPECT_NEAR(sys.D[i].real(), 1.0 / (c[i] * c[i]), 1e-15);
    }
  }
}

TEST(Assemble, SymmetrizedOperatorIsComplexSymmetric)
{
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> cells(3, 12);
  std::uniform_int_distribution<int> layer(1, 4);
  std::uniform_real_distribution<double> cp(1.0, 60.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + trial % 2;
    const int nx = dim == 1 ? 8 * cells(rng) : cells(rng);
    const Grid g = Grid::from_cells(dim, {nx, cells(rng), 1}, 0.05, 2.0 * pi * 3.0,
                                    PmlConfig{layer(rng), cp(rng)});
    ASSERT_LE(g.unknowns(), 400u);
    const HelmholtzSystem sys = assemble(g, VelocityModel::homogeneous(g));
    DenseMatrix WA = to_dense(sys.A);
    for (Eigen::Index i = 0; i < WA.rows(); ++i) WA.row(i) *= sys.symmetrizer[i];
    EXPECT_LT((WA - WA.transpose()).norm(), 1e-13 * WA.norm());
  }
}

TEST(Assemble, ZeroLayerIsDirichletLaplacian)
{
  const double h = 0.1;
  const double omega = 2.0 * pi * 1.3;
  const Grid g = Grid::from_cells(2, {6, 5, 1}, h, omega, PmlConfig{0, 20.0});
  const HelmholtzSystem sys = assemble(g, VelocityModel::homogeneous(g));
  const int nx = g.axis_points(0);
  const int ny = g.axis_points(1);
  ASSERT_EQ(nx, 5);
  ASSERT_EQ(ny, 4);
  DenseMatrix ref = DenseMatrix::Zero(nx * ny, nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = j * nx + i;
      ref(r, r) = omega * omega - 4.0 / (h * h);
      if (i > 0) ref(r, r - 1) = 1.0 / (h * h);
      if (i + 1 < nx) ref(r, r + 1) = 1.0 / (h * h);
      if (j > 0) ref(r, r - nx) = 1.0 / (h * h);
      if (j + 1 < ny) ref(r, r + nx) = 1.0 / (h * h);
    }
  }
  // Equal up to the rounding of the coefficient products.
  const DenseMatrix A = to_dense(sys.A);
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      EXPECT_LE(std::abs(A(i, j) - ref(i, j)), 4e-16 * std::abs(ref(i, j))) << i << ',' << j;
    }
  }
}

TEST(Assemble, RowSparsity)
{
  for (int dim = 1; dim <= 3; ++dim) {
    const Grid g = Grid::for_frequency(dim, 2.0, 8.0);
    const HelmholtzSystem sys = assemble(g, VelocityModel::homogeneous(g));
    const auto rp = sys.A.row_ptr();
    for (Index i = 0; i < sys.A.rows(); ++i) EXPECT_LE(rp[i + 1] - rp[i], 1 + 2 * dim);
  }
}

TEST(Assemble, RejectsMismatchedModel)
{
  const Grid g = Grid::for_frequency(2, 2.0, 8.0);
  EXPECT_THROW(assemble(g, VelocityModel::from_values({1.0, 1.0}, {2, 1, 1})), DimensionError);
}

TEST(Shift, DefinitionAndSpectrum)
{
  const Grid g = Grid::for_frequency(1, 3.0, 10.0);
  const HelmholtzSystem sys = assemble(g, VelocityModel::homogeneous(g));
  EXPECT_EQ(to_dense(apply_shift(sys, 0.0)), to_dense(sys.A));

  const double s = 0.2;
  const CsrMatrix As = apply_shift(sys, s);
  ASSERT_EQ(As.nnz(), sys.A.nnz());
  const DenseMatrix diff = to_dense(As) - to_dense(sys.A);
  const Complex shift(0.0, g.omega * g.omega * s);
  EXPECT_LT((diff - shift * DenseMatrix::Identity(diff.rows(), diff.cols())).norm(),
            1e-12 * std::abs(shift));

  auto sorted_eigs = [](const DenseMatrix& M) {
    Eigen::ComplexEigenSolver<DenseMatrix> es(M, false);
    std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + M.rows());
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
  };
  const auto e0 = sorted_eigs(to_dense(sys.A));
  const auto e1 = sorted_eigs(to_dense(As));
  const double scale = to_dense(sys.A).norm();
  for (std::size_t k = 0; k < e0.size(); ++k) {
    EXPECT_LT(std::abs(e1[k] - (e0[k] + shift)), 1e-10 * scale);
  }
  EXPECT_THROW(apply_shift(sys, -1.0), DomainError);
}

TEST(Source, DeltaScaling)
{
  const Grid g = Grid::from_cells(2, {10, 10, 1}, 0.1, 2.0 * pi, PmlConfig{2, 20.0});
  const Vector f = build_source(g, centered_delta(g));
  std::size_t nonzero = 0;
  for (const Complex& x : f) nonzero += x != Complex(0.0) ? 1 : 0;
  EXPECT_EQ(nonzero, 1u);
  const int c = 5 + g.pml.thickness_points - 1;
  EXPECT_NEAR(f[g.index({c, c, 0})].real(), 100.0, 1e-9);
  EXPECT_THROW(build_source(g, DeltaSource{{1.5, 0.5, 0.5}}), DomainError);
}

TEST(Source, PairedGaussiansCancel)
{
  for (int dim : {2, 3}) {
    const Grid g = Grid::for_frequency(dim, dim == 2 ? 20.0 : 4.0, 10.0);
    const GaussianSumSource spec = paired_gaussian_source(g);
    EXPECT_EQ(spec.poles.size(), dim == 2 ? 2u : 6u);
    const Vector f = build_source(g, spec);
    Complex sum = 0.0;
    double peak = 0.0;
    for (const Complex& x : f) {
      sum += x;
      peak = std::max(peak, std::abs(x));
    }
    EXPECT_LT(std::abs(sum), 1e-6 * peak) << dim << "D";
    // A single pole integrates to one.
    const Vector one = build_source(g, GaussianSumSource{{spec.poles.front()}});
    double integral = 0.0;
    for (const Complex& x : one) integral += x.real();
    EXPECT_NEAR(integral * std::pow(g.h, dim), spec.poles.front().sign, 1e-6);
  }
}

}  // namespace
