// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_RUN_CONFIG_HPP
#define MATEXPRE_RUN_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace matexpre
{

/// Every parameter of one CLI invocation. Serialized as flat key = value
/// text; unset optionals print as "auto" and resolve from the problem.
struct RunConfig
{
  std::string command = "solve";  ///< solve | spectrum | psibench | sweep

  int dim = 2;
  double freq = 40.0;
  double ppw = 10.0;
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  std::string model = "homogeneous";  ///< homogeneous | lens | file
  std::array<double, 3> lens_center{0.5, 0.1, 0.5};
  double lens_sigma = 1.0 / 32.0;
  std::string model_header;
  std::string model_payload;

  std::optional<int> pml_points;  ///< default: one unit-speed wavelength
  double c_pml = 20.0;

  std::string source = "auto";  ///< auto | gaussian | delta
  std::optional<double> t;      ///< default: 0.4/freq^2 (10/ppw)^2
  std::optional<double> s;      ///< default: 1/freq
  double fprtol = 0.08;
  double exp_action_tol = 1e-7;
  int inner_restart = 30;
  int inner_max_iters = 1000;
  bool round_parameters = false;

  double outer_rtol = 1e-5;
  int outer_restart = 30;
  int outer_max_iters = 500;

  std::uint64_t seed = 0;
  std::string output_dir = "matexpre_out";

  // psibench / spectrum / sweep
  std::vector<double> freqs{20.0, 40.0};
  std::vector<double> t_factors{0.4, 0.8, 1.2, 1.6};  ///< t = factor / freq^2
  std::vector<double> c_pml_values{20.0};
  std::vector<int> pml_points_values;  ///< empty: one wavelength
  std::vector<double> ppw_values{10.0};
  bool normalize_spectrum = false;

  void validate() const;
  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  /// Applies the key = value lines of `text` on top of this configuration.
  void merge_text(const std::string& text);

  bool operator==(const RunConfig&) const = default;
};

}  // namespace matexpre

#endif  // MATEXPRE_RUN_CONFIG_HPP
