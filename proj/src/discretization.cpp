// SPDX-License-Identifier: Apache-2.0

#include "matexpre/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "matexpre/error.hpp"

namespace matexpre
{

void PmlConfig::validate() const
{
  if (thickness_points < 1) {
    throw DomainError("PmlConfig: thickness_points must be >= 1");
  }
  if (!(c_pml > 0.0)) {
    throw DomainError("PmlConfig: c_pml must be positive");
  }
}

Complex pml_stretch(double x, Interval inner, const PmlConfig& pml, double delta, double omega)
{
  const double slack = 1e-12 * (delta + (inner.hi - inner.lo));
  if (x < inner.lo - delta - slack || x > inner.hi + delta + slack) {
    throw DomainError("pml_stretch: coordinate " + std::to_string(x) +
                      " lies outside the padded interval");
  }
  double depth = 0.0;
  if (x < inner.lo) {
    depth = inner.lo - x;
  }
  else if (x > inner.hi) {
    depth = x - inner.hi;
  }
  if (depth == 0.0) {
    return 1.0;
  }
  const double ratio = depth / delta;
  return Complex(1.0, pml.c_pml / (delta * omega) * ratio * ratio);
}

// ---------------------------------------------------------------------------
// Grid

Grid Grid::for_frequency(int dim, double freq, double ppw, std::optional<PmlConfig> pml,
                         std::array<double, 3> lengths)
{
  if (dim < 1 || dim > 3) {
    throw DomainError("Grid: dim must be 1, 2 or 3");
  }
  if (!(freq > 0.0) || !(ppw > 0.0)) {
    throw DomainError("Grid: freq and ppw must be positive");
  }
  double longest = 0.0;
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0)) {
      throw DomainError("Grid: domain lengths must be positive");
    }
    longest = std::max(longest, lengths[a]);
  }
  const double h_target = 1.0 / (freq * ppw);
  const int cells_longest = std::max(2, static_cast<int>(std::lround(longest / h_target)));
  const double h = longest / cells_longest;

  std::array<int, 3> cells{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    cells[a] = std::max(2, static_cast<int>(std::lround(lengths[a] / h)));
  }
  const double omega = 2.0 * std::numbers::pi * freq;
  PmlConfig layer = pml.value_or(PmlConfig{});
  if (!pml) {
    layer.thickness_points = std::max(1, static_cast<int>(std::lround(2.0 * std::numbers::pi /
                                                                      (omega * h))));
  }
  return from_cells(dim, cells, h, omega, layer);
}

Grid Grid::from_cells(int dim, std::array<int, 3> cells, double h, double omega, PmlConfig pml)
{
  Grid g;
  g.dim = dim;
  g.h = h;
  g.omega = omega;
  g.pml = pml;
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      g.inner_points[a] = cells[a] - 1;
      g.extent[a] = Interval{0.0, cells[a] * h};
    }
    else {
      g.inner_points[a] = 1;
      g.extent[a] = Interval{0.0, 0.0};
    }
  }
  g.ppw = 2.0 * std::numbers::pi / (omega * h);
  g.validate();
  return g;
}

double Grid::freq() const { return omega / (2.0 * std::numbers::pi); }

int Grid::axis_points(int axis) const
{
  return axis < dim ? inner_points[axis] + 2 * pml.thickness_points : 1;
}

std::size_t Grid::unknowns() const
{
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) {
    n *= static_cast<std::size_t>(axis_points(a));
  }
  return n;
}

double Grid::coordinate(int axis, int k) const
{
  return extent[axis].lo - delta() + (k + 1) * h;
}

std::size_t Grid::index(std::array<int, 3> ijk) const
{
  std::size_t idx = 0;
  for (int a = dim - 1; a >= 0; --a) {
    idx = idx * static_cast<std::size_t>(axis_points(a)) + static_cast<std::size_t>(ijk[a]);
  }
  return idx;
}

void Grid::validate() const
{
  if (dim < 1 || dim > 3) {
    throw DomainError("Grid: dim must be 1, 2 or 3");
  }
  if (!(h > 0.0) || !(omega > 0.0)) {
    throw DomainError("Grid: h and omega must be positive");
  }
  for (int a = 0; a < dim; ++a) {
    if (inner_points[a] < 1) {
      throw DomainError("Grid: each axis needs at least one inner point");
    }
  }
  if (pml.thickness_points != 0) {
    pml.validate();
  }
  else if (!(pml.c_pml > 0.0)) {
    throw DomainError("PmlConfig: c_pml must be positive");
  }
  const double expected = 2.0 * std::numbers::pi / (omega * h);
  if (std::abs(ppw - expected) > 1e-12 * expected) {
    throw DomainError("Grid: stored ppw disagrees with 2 pi/(omega h)");
  }
}

// ---------------------------------------------------------------------------
// Velocity models

VelocityModel VelocityModel::from_values(std::vector<double> values, std::array<int, 3> dims)
{
  std::size_t expected = 1;
  for (int d : dims) {
    if (d < 1) {
      throw DimensionError("VelocityModel: dims must be positive");
    }
    expected *= static_cast<std::size_t>(d);
  }
  if (values.size() != expected) {
    throw DimensionError("VelocityModel: " + std::to_string(values.size()) +
                         " values for dims product " + std::to_string(expected));
  }
  VelocityModel m;
  m.dims = dims;
  m.c_min = values.empty() ? 0.0 : values.front();
  m.c_max = m.c_min;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError("VelocityModel: non-finite wave speed");
    }
    if (!(v > 0.0)) {
      throw DomainError("VelocityModel: wave speeds must be positive");
    }
    m.c_min = std::min(m.c_min, v);
    m.c_max = std::max(m.c_max, v);
  }
  m.values = std::move(values);
  return m;
}

VelocityModel VelocityModel::homogeneous(const Grid& grid, double c)
{
  return from_values(std::vector<double>(grid.unknowns(), c),
                     {grid.axis_points(0), grid.axis_points(1), grid.axis_points(2)});
}

VelocityModel VelocityModel::converging_lens(const Grid& grid, std::array<double, 3> center,
                                             double sigma)
{
  std::vector<double> values(grid.unknowns());
  const int nx = grid.axis_points(0);
  const int ny = grid.axis_points(1);
  const int nz = grid.axis_points(2);
  std::size_t idx = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::array<int, 3> ijk{i, j, k};
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
          const double d = grid.coordinate(a, ijk[a]) - center[a];
          r2 += d * d;
        }
        values[idx++] = 1.0 - 0.5 * std::exp(-r2 / (2.0 * sigma * sigma));
      }
    }
  }
  return from_values(std::move(values), {nx, ny, nz});
}

VelocityModel normalize_min_speed(const VelocityModel& model)
{
  VelocityModel out = model;
  const double factor = model.c_min;
  for (double& v : out.values) {
    v /= factor;
  }
  out.c_min = model.c_min / factor;
  out.c_max = model.c_max / factor;
  out.scale_factor = model.scale_factor * factor;
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

namespace
{

struct AxisCoefficients
{
  std::vector<Complex> s_node;
  std::vector<Complex> inv_s_node;
  std::vector<Complex> inv_s_left;   // at x_k - h/2
  std::vector<Complex> inv_s_right;  // at x_k + h/2
};

AxisCoefficients axis_coefficients(const Grid& grid, int axis)
{
  const int n = grid.axis_points(axis);
  AxisCoefficients c;
  c.s_node.resize(n);
  c.inv_s_node.resize(n);
  c.inv_s_left.resize(n);
  c.inv_s_right.resize(n);
  const double delta = grid.delta();
  for (int k = 0; k < n; ++k) {
    const double x = grid.coordinate(axis, k);
    c.s_node[k] = pml_stretch(x, grid.extent[axis], grid.pml, delta, grid.omega);
    c.inv_s_node[k] = 1.0 / c.s_node[k];
    c.inv_s_left[k] =
      1.0 / pml_stretch(x - 0.5 * grid.h, grid.extent[axis], grid.pml, delta, grid.omega);
    c.inv_s_right[k] =
      1.0 / pml_stretch(x + 0.5 * grid.h, grid.extent[axis], grid.pml, delta, grid.omega);
  }
  return c;
}

}  // namespace

HelmholtzSystem assemble(const Grid& grid, const VelocityModel& model)
{
  grid.validate();
  const std::size_t n = grid.unknowns();
  if (model.values.size() != n) {
    throw DimensionError("assemble: velocity model has " + std::to_string(model.values.size()) +
                         " values but the grid has " + std::to_string(n) + " nodes");
  }
  for (double c : model.values) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw DomainError("assemble: wave speeds must be finite and positive");
    }
  }

  std::array<AxisCoefficients, 3> axes;
  for (int a = 0; a < grid.dim; ++a) {
    axes[a] = axis_coefficients(grid, a);
  }
  const std::array<int, 3> npts{grid.axis_points(0), grid.axis_points(1), grid.axis_points(2)};
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int a = 1; a < grid.dim; ++a) {
    stride[a] = stride[a - 1] * static_cast<std::size_t>(npts[a - 1]);
  }
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  const double omega2 = grid.omega * grid.omega;

  std::vector<Offset> row_ptr;
  std::vector<Index> col_idx;
  std::vector<Complex> values;
  row_ptr.reserve(n + 1);
  col_idx.reserve(n * (2 * grid.dim + 1));
  values.reserve(n * (2 * grid.dim + 1));
  row_ptr.push_back(0);

  HelmholtzSystem sys;
  sys.D.resize(n);
  sys.symmetrizer.resize(n);

  // Neighbour slots in increasing column order: z-, y-, x-, centre, x+, y+, z+.
  std::array<Complex, 7> coeff{};
  std::array<bool, 7> present{};
  std::size_t row = 0;
  for (int k = 0; k < npts[2]; ++k) {
    for (int j = 0; j < npts[1]; ++j) {
      for (int i = 0; i < npts[0]; ++i, ++row) {
        const std::array<int, 3> ijk{i, j, k};
        coeff.fill(0.0);
        present.fill(false);
        const double inv_c2 = 1.0 / (model.values[row] * model.values[row]);
        coeff[3] = omega2 * inv_c2;
        present[3] = true;
        Complex weight = 1.0;
        for (int a = 0; a < grid.dim; ++a) {
          const AxisCoefficients& ax = axes[a];
          const int p = ijk[a];
          const Complex left = ax.inv_s_node[p] * ax.inv_s_left[p] * inv_h2;
          const Complex right = ax.inv_s_node[p] * ax.inv_s_right[p] * inv_h2;
          coeff[3] -= left + right;
          if (p > 0) {
            coeff[2 - a] = left;
            present[2 - a] = true;
          }
          if (p + 1 < npts[a]) {
            coeff[4 + a] = right;
            present[4 + a] = true;
          }
          weight *= ax.s_node[p];
        }
        for (int slot = 0; slot < 7; ++slot) {
          if (!present[slot]) continue;
          std::size_t col = row;
          if (slot < 3) col -= stride[2 - slot];
          if (slot > 3) col += stride[slot - 4];
          col_idx.push_back(static_cast<Index>(col));
          values.push_back(coeff[slot]);
        }
        row_ptr.push_back(static_cast<Offset>(col_idx.size()));
        sys.D[row] = Complex(inv_c2, 0.0);
        sys.symmetrizer[row] = weight;
      }
    }
  }
  sys.A = CsrMatrix(static_cast<Index>(n), static_cast<Index>(n), std::move(row_ptr),
                    std::move(col_idx), std::move(values));
  sys.grid = grid;
  return sys;
}

CsrMatrix apply_shift(const HelmholtzSystem& sys, double s)
{
  if (!(s >= 0.0)) {
    throw DomainError("apply_shift: shift must be nonnegative");
  }
  const double omega2 = sys.grid.omega * sys.grid.omega;
  Vector diag(sys.D.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    diag[i] = Complex(0.0, omega2 * s) * sys.D[i];
  }
  return sys.A.plus_diagonal(diag);
}

// ---------------------------------------------------------------------------
// Sources

Vector build_source(const Grid& grid, const SourceSpec& spec)
{
  Vector f(grid.unknowns(), 0.0);
  if (const auto* delta = std::get_if<DeltaSource>(&spec)) {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = 0; a < grid.dim; ++a) {
      const double x = delta->location[a];
      const Interval iv = grid.extent[a];
      if (x < iv.lo || x > iv.hi) {
        throw DomainError("build_source: delta location outside the inner domain");
      }
      const long k = std::lround((x - (iv.lo - grid.delta())) / grid.h) - 1;
      ijk[a] = static_cast<int>(std::clamp<long>(k, 0, grid.axis_points(a) - 1));
    }
    f[grid.index(ijk)] = std::pow(grid.h, -grid.dim);
    return f;
  }

  const auto& sum = std::get<GaussianSumSource>(spec);
  for (const GaussianPole& pole : sum.poles) {
    if (!(pole.radius > 0.0)) {
      throw DomainError("build_source: Gaussian radius must be positive");
    }
  }
  const int nx = grid.axis_points(0);
  const int ny = grid.axis_points(1);
  const int nz = grid.axis_points(2);
  std::size_t idx = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i, ++idx) {
        const std::array<int, 3> ijk{i, j, k};
        double value = 0.0;
        for (const GaussianPole& pole : sum.poles) {
          double r2 = 0.0;
          for (int a = 0; a < grid.dim; ++a) {
            const double d = grid.coordinate(a, ijk[a]) - pole.center[a];
            r2 += d * d;
          }
          const double amplitude =
            std::pow(2.0 * std::numbers::pi * pole.radius * pole.radius, -0.5 * grid.dim);
          value += pole.sign * amplitude * std::exp(-r2 / (2.0 * pole.radius * pole.radius));
        }
        f[idx] = value;
      }
    }
  }
  return f;
}

GaussianSumSource paired_gaussian_source(const Grid& grid)
{
  std::array<double, 3> mid{};
  for (int a = 0; a < grid.dim; ++a) {
    mid[a] = 0.5 * (grid.extent[a].lo + grid.extent[a].hi);
  }
  GaussianSumSource src;
  const int pairs = grid.dim == 3 ? 3 : 1;
  for (int a = 0; a < pairs; ++a) {
    for (double sign : {-1.0, 1.0}) {
      GaussianPole pole;
      pole.center = mid;
      pole.center[a] += sign * 6.0 * grid.h;
      pole.radius = 3.0 * grid.h;
      pole.sign = sign;
      src.poles.push_back(pole);
    }
  }
  return src;
}

DeltaSource centered_delta(const Grid& grid)
{
  DeltaSource d;
  for (int a = 0; a < grid.dim; ++a) {
    d.location[a] = 0.5 * (grid.extent[a].lo + grid.extent[a].hi);
  }
  return d;
}

}  // namespace matexpre
