// SPDX-License-Identifier: Apache-2.0

#include "matexpre/drivers.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "matexpre/kernels.hpp"
#include "matexpre/model_io.hpp"

namespace matexpre
{

namespace
{

std::filesystem::path output_dir(const RunConfig& cfg)
{
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

Problem build_problem(const RunConfig& cfg)
{
  cfg.validate();
  std::optional<PmlConfig> pml;
  if (cfg.pml_points) {
    pml = PmlConfig{*cfg.pml_points, cfg.c_pml};
  }

  VelocityModel raw;
  std::array<double, 3> lengths = cfg.lengths;
  if (cfg.model == "file") {
    raw = load_velocity_model(cfg.model_header, cfg.model_payload);
    const ModelHeader h = ModelHeader::read(cfg.model_header);
    if (h.ndim != cfg.dim) {
      throw DimensionError("model file has " + std::to_string(h.ndim) + " axes but dim = " +
                           std::to_string(cfg.dim));
    }
    double longest = 0.0;
    for (int a = 0; a < h.ndim; ++a) longest = std::max(longest, (h.dims[a] - 1) * h.spacing);
    for (int a = 0; a < h.ndim; ++a) {
      lengths[a] = longest > 0.0 ? std::max((h.dims[a] - 1) * h.spacing / longest, 1e-12) : 1.0;
    }
  }

  Problem p;
  p.grid = Grid::for_frequency(cfg.dim, cfg.freq, cfg.ppw, pml, lengths);
  if (!cfg.pml_points) {
    p.grid.pml.c_pml = cfg.c_pml;
  }
  if (cfg.model == "homogeneous") {
    p.model = VelocityModel::homogeneous(p.grid);
  }
  else if (cfg.model == "lens") {
    p.model = VelocityModel::converging_lens(p.grid, cfg.lens_center, cfg.lens_sigma);
  }
  else {
    p.model = fit_model_to_grid(raw, p.grid);
  }
  p.system = assemble(p.grid, p.model);

  const bool gaussian =
    cfg.source == "gaussian" || (cfg.source == "auto" && cfg.model == "homogeneous");
  p.source = gaussian ? build_source(p.grid, paired_gaussian_source(p.grid))
                      : build_source(p.grid, centered_delta(p.grid));
  return p;
}

PreconditionerConfig resolve_preconditioner(const RunConfig& cfg, const Grid& grid)
{
  PreconditionerConfig pc = suggest_parameters(grid, cfg.round_parameters);
  if (cfg.t) pc.t = *cfg.t;
  if (cfg.s) pc.s = *cfg.s;
  pc.fprtol = cfg.fprtol;
  pc.exp_action_tol = cfg.exp_action_tol;
  pc.inner_restart = cfg.inner_restart;
  pc.inner_max_iters = cfg.inner_max_iters;
  pc.validate();
  return pc;
}

int run_solve(const RunConfig& cfg, std::ostream& log)
{
  const Problem p = build_problem(cfg);
  const PreconditionerConfig pc = resolve_preconditioner(cfg, p.grid);
  const auto dir = output_dir(cfg);
  {
    std::ofstream resolved = open_out(dir / "config.txt");
    resolved << cfg.to_text();
  }
  log << "grid: dim=" << p.grid.dim << " unknowns=" << p.grid.unknowns() << " h=" << p.grid.h
      << " pml_points=" << p.grid.pml.thickness_points << '\n'
      << "preconditioner: t=" << pc.t << " s=" << pc.s << " fprtol=" << pc.fprtol << '\n';

  OuterOptions outer;
  outer.rtol = cfg.outer_rtol;
  outer.restart = cfg.outer_restart;
  outer.max_iters = cfg.outer_max_iters;

  Vector u;
  SolveStats stats;
  int status = 0;
  try {
    auto [sol, st] = solve_helmholtz(p.system, pc, p.source, outer);
    u = std::move(sol);
    stats = std::move(st);
  }
  catch (const SolveError& e) {
    log << "error: " << e.what() << '\n';
    u = e.partial();
    stats = e.stats();
    status = 2;
  }

  {
    std::ofstream csv = open_out(dir / "iterations.csv");
    csv << "outer_iter,inner_iters,outer_relative_residual\n";
    for (int k = 0; k < stats.outer_iterations; ++k) {
      const int inner =
        k < static_cast<int>(stats.inner_iterations.size()) ? stats.inner_iterations[k] : 0;
      const double res =
        k < static_cast<int>(stats.outer_residuals.size()) ? stats.outer_residuals[k] : 0.0;
      csv << (k + 1) << ',' << inner << ',' << res << '\n';
    }
  }
  {
    std::ofstream st = open_out(dir / "stats.txt");
    st << "converged = " << (stats.converged ? 1 : 0) << '\n'
       << "outer_iterations = " << stats.outer_iterations << '\n'
       << "inner_mean = " << stats.inner_mean << '\n'
       << "inner_std = " << stats.inner_std << '\n'
       << "total_spmv = " << stats.total_spmv << '\n'
       << "final_relative_residual = " << stats.final_relative_residual << '\n'
       << "wall_time_seconds = " << stats.wall_time << '\n'
       << "unknowns = " << p.grid.unknowns() << '\n'
       << "t = " << pc.t << '\n'
       << "s = " << pc.s << '\n'
       << "fprtol = " << pc.fprtol << '\n'
       << "velocity_scale_factor = " << p.model.scale_factor << '\n';
  }
  write_solution(dir / "solution", p.grid, u);
  log << "outer=" << stats.outer_iterations << " inner=" << stats.inner_mean << "+-"
      << stats.inner_std << " spmv=" << stats.total_spmv
      << " residual=" << stats.final_relative_residual << " time=" << stats.wall_time << "s\n";
  return status;
}

int run_spectrum(const RunConfig& cfg, std::ostream& log)
{
  PmlSpectrumSpec spec = cfg.pml_points
                           ? PmlSpectrumSpec{}
                           : PmlSpectrumSpec::one_wavelength(cfg.freq, cfg.ppw, cfg.c_pml);
  spec.freq = cfg.freq;
  spec.ppw = cfg.ppw;
  spec.c_pml = cfg.c_pml;
  spec.length = cfg.lengths[0];
  if (cfg.pml_points) spec.thickness_points = *cfg.pml_points;
  spec.normalize = cfg.normalize_spectrum;
  const SpectrumReport rep = pml_spectrum(spec);
  const auto dir = output_dir(cfg);
  std::ofstream csv = open_out(dir / "spectrum.csv");
  csv << "real,imag\n";
  for (const Complex& z : rep.eigenvalues) csv << z.real() << ',' << z.imag() << '\n';
  log << "eigenvalues=" << rep.eigenvalues.size() << " min_imag=" << rep.min_imag
      << " scaled_by=" << rep.scaled_by << '\n';
  return 0;
}

// One Krylov cycle per action where memory allows, so the counts measure
// the action itself rather than the restart length of the preconditioner.
// At freq 40 a 1000-vector basis takes about 2.8 GB.
constexpr int psibench_max_dim = 1000;
constexpr std::size_t psibench_memory_budget = std::size_t{3} << 30;

std::vector<PsiBenchRow> psibench(const RunConfig& cfg)
{
  std::vector<PsiBenchRow> rows;
  for (double freq : cfg.freqs) {
    RunConfig c = cfg;
    c.freq = freq;
    const Problem p = build_problem(c);
    Vector v = p.source;
    const double nv = kernels::norm2(v);
    if (nv == 0.0) throw DomainError("psibench: zero source");
    kernels::scale(1.0 / nv, v);
    ArnoldiWorkspace ws;
    for (double factor : cfg.t_factors) {
      PsiBenchRow row;
      row.freq = freq;
      row.t_factor = factor;
      row.t = factor / (freq * freq) * (10.0 / cfg.ppw) * (10.0 / cfg.ppw);
      PsiActionOptions opts;
      opts.tol = cfg.exp_action_tol;
      opts.basis = PreconditionerConfig{}.basis;
      opts.max_dim = psibench_max_dim;
      opts.memory_budget = psibench_memory_budget;
      ws.check_from = 1;
      opts.workspace = &ws;
      row.psi0_spmv = psi_action(0, p.system.A, row.t, v, opts).spmv_count;
      ws.check_from = 1;
      row.psi1_spmv = psi_action(1, p.system.A, row.t, v, opts).spmv_count;
      rows.push_back(row);
    }
  }
  return rows;
}

int run_psibench(const RunConfig& cfg, std::ostream& log)
{
  const auto rows = psibench(cfg);
  const auto dir = output_dir(cfg);
  std::ofstream csv = open_out(dir / "psibench.csv");
  csv << "freq,t_factor,t,psi0_spmv,psi1_spmv\n";
  for (const auto& r : rows) {
    csv << r.freq << ',' << r.t_factor << ',' << r.t << ',' << r.psi0_spmv << ','
        << r.psi1_spmv << '\n';
    log << "freq=" << r.freq << " t=" << r.t_factor << "/freq^2 psi0=" << r.psi0_spmv
        << " psi1=" << r.psi1_spmv << '\n';
  }
  return 0;
}

std::vector<PmlSpectrumSpec> sweep_points(const RunConfig& cfg)
{
  std::vector<PmlSpectrumSpec> pts;
  for (double freq : cfg.freqs) {
    for (double ppw : cfg.ppw_values) {
      for (double c : cfg.c_pml_values) {
        if (cfg.pml_points_values.empty()) {
          PmlSpectrumSpec s = PmlSpectrumSpec::one_wavelength(freq, ppw, c);
          s.length = cfg.lengths[0];
          pts.push_back(s);
        }
        for (int points : cfg.pml_points_values) {
          PmlSpectrumSpec s;
          s.freq = freq;
          s.ppw = ppw;
          s.c_pml = c;
          s.thickness_points = points;
          s.length = cfg.lengths[0];
          pts.push_back(s);
        }
      }
    }
  }
  return pts;
}

int run_sweep(const RunConfig& cfg, std::ostream& log)
{
  const auto rows = min_imag_sweep(sweep_points(cfg));
  const auto dir = output_dir(cfg);
  std::ofstream csv = open_out(dir / "sweep.csv");
  csv << "freq,ppw,pml_points,c_pml,unknowns,min_imag\n";
  for (const auto& r : rows) {
    csv << r.spec.freq << ',' << r.spec.ppw << ',' << r.thickness_points << ',' << r.spec.c_pml
        << ',' << r.unknowns << ',' << r.min_imag << '\n';
  }
  log << "sweep points=" << rows.size() << '\n';
  return 0;
}

int run_command(const RunConfig& cfg, std::ostream& log)
{
  cfg.validate();
  if (cfg.command == "solve") return run_solve(cfg, log);
  if (cfg.command == "spectrum") return run_spectrum(cfg, log);
  if (cfg.command == "psibench") return run_psibench(cfg, log);
  return run_sweep(cfg, log);
}

}  // namespace matexpre
