// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_DRIVERS_HPP
#define MATEXPRE_DRIVERS_HPP

#include <iosfwd>
#include <vector>

#include "matexpre/discretization.hpp"
#include "matexpre/preconditioner.hpp"
#include "matexpre/run_config.hpp"
#include "matexpre/spectral.hpp"

namespace matexpre
{

/// Grid, medium, assembled operator and source resolved from a RunConfig.
struct Problem
{
  Grid grid;
  VelocityModel model;
  HelmholtzSystem system;
  Vector source;
};

Problem build_problem(const RunConfig& cfg);

/// Suggested parameters overridden by any explicit t / s / tolerances.
PreconditionerConfig resolve_preconditioner(const RunConfig& cfg, const Grid& grid);

/// Exit codes: 0 success, 2 no convergence (artifacts still written).
int run_solve(const RunConfig& cfg, std::ostream& log);
int run_spectrum(const RunConfig& cfg, std::ostream& log);
int run_psibench(const RunConfig& cfg, std::ostream& log);
int run_sweep(const RunConfig& cfg, std::ostream& log);
/// Dispatches on cfg.command.
int run_command(const RunConfig& cfg, std::ostream& log);

struct PsiBenchRow
{
  double freq = 0.0;
  double t_factor = 0.0;
  double t = 0.0;
  int psi0_spmv = 0;
  int psi1_spmv = 0;
};

/// SpMV counts of psi_0 and psi_1 actions of i t A on the normalized source
/// for every (freq, t_factor) pair of the configuration.
std::vector<PsiBenchRow> psibench(const RunConfig& cfg);

/// The spectral sweep points of the configuration: freqs x ppw_values x
/// c_pml_values x pml_points_values (one wavelength when that list is empty).
std::vector<PmlSpectrumSpec> sweep_points(const RunConfig& cfg);

}  // namespace matexpre

#endif  // MATEXPRE_DRIVERS_HPP
