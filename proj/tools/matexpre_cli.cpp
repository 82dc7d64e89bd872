// SPDX-License-Identifier: Apache-2.0
//
// matexpre {solve|spectrum|psibench|sweep} [--config FILE] [--key value ...]
//
// Every flag is a RunConfig key with '_' spelled '-'. Flags override values
// read from --config; anything unset keeps its default.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "matexpre/drivers.hpp"
#include "matexpre/error.hpp"
#include "matexpre/kernels.hpp"

namespace
{

const char* const keys[] = {
  "dim",           "freq",           "ppw",          "lengths",           "model",
  "lens_center",   "lens_sigma",     "model_header", "model_payload",     "pml_points",
  "c_pml",         "source",         "t",            "s",                 "fprtol",
  "exp_action_tol", "inner_restart", "inner_max_iters", "round_parameters", "outer_rtol",
  "outer_restart", "outer_max_iters", "seed",        "output_dir",        "freqs",
  "t_factors",     "c_pml_values",   "pml_points_values", "ppw_values",   "normalize_spectrum",
};

std::string flag_name(std::string key)
{
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Matrix-exponential preconditioned Helmholtz solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> values;
  const std::pair<const char*, const char*> commands[] = {
    {"solve", "Preconditioned FGMRES solve; writes solution, stats and residual history"},
    {"spectrum", "Eigenvalues of a 1D PML operator"},
    {"psibench", "SpMV counts of psi_0 / psi_1 actions over freqs x t_factors"},
    {"sweep", "Smallest imaginary eigenvalue part over 1D PML configurations"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value file applied before flags");
    for (const char* key : keys) {
      sub->add_option(flag_name(key), values[key]);
    }
  }
  CLI11_PARSE(app, argc, argv);

  const int threads = matexpre::kernels::configure_threads_from_env();
  try {
    matexpre::RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw matexpre::FormatError("cannot open " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.merge_text(ss.str());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    for (const auto& [key, value] : values) {
      if (app.get_subcommands().front()->count(flag_name(key)) > 0) {
        cfg.merge_text(key + " = " + value);
      }
    }
    std::clog << "threads=" << threads << '\n';
    return matexpre::run_command(cfg, std::clog);
  }
  catch (const matexpre::Error& e) {
    std::cerr << "matexpre: " << e.what() << '\n';
    return 1;
  }
}
