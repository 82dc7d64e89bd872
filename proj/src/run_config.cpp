// SPDX-License-Identifier: Apache-2.0

#include "matexpre/run_config.hpp"

#include <charconv>
#include <sstream>

#include "matexpre/error.hpp"

namespace matexpre
{

namespace
{

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Shortest text that parses back to the same double.
std::string fmt(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text)
{
  T out{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw FormatError("config: cannot parse '" + text + "' for key '" + key + "'");
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
  std::vector<T> out;
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::string item;
  while (in >> item) out.push_back(parse_value<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs)
{
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += fmt(xs[i]);
    else out += std::to_string(xs[i]);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw FormatError("config: '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const
{
  if (command != "solve" && command != "spectrum" && command != "psibench" && command != "sweep") {
    throw DomainError("config: unknown command '" + command + "'");
  }
  if (dim < 1 || dim > 3) throw DomainError("config: dim must be 1, 2 or 3");
  if (!(freq > 0.0) || !(ppw > 0.0)) throw DomainError("config: freq and ppw must be positive");
  if (model != "homogeneous" && model != "lens" && model != "file") {
    throw DomainError("config: model must be homogeneous, lens or file");
  }
  if (model == "file" && (model_header.empty() || model_payload.empty())) {
    throw DomainError("config: model = file needs model_header and model_payload");
  }
  if (source != "auto" && source != "gaussian" && source != "delta") {
    throw DomainError("config: source must be auto, gaussian or delta");
  }
  if (!(outer_rtol > 0.0 && outer_rtol < 1.0)) {
    throw DomainError("config: outer_rtol must lie in (0, 1)");
  }
}

std::string RunConfig::to_text() const
{
  std::ostringstream out;
  auto opt = [](const auto& o) {
    if (!o) return std::string("auto");
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(*o)>>) return fmt(*o);
    else return std::to_string(*o);
  };
  out << "command = " << command << '\n'
      << "dim = " << dim << '\n'
      << "freq = " << fmt(freq) << '\n'
      << "ppw = " << fmt(ppw) << '\n'
      << "lengths = " << fmt(lengths[0]) << ',' << fmt(lengths[1]) << ',' << fmt(lengths[2])
      << '\n'
      << "model = " << model << '\n'
      << "lens_center = " << fmt(lens_center[0]) << ',' << fmt(lens_center[1]) << ','
      << fmt(lens_center[2]) << '\n'
      << "lens_sigma = " << fmt(lens_sigma) << '\n'
      << "model_header = " << model_header << '\n'
      << "model_payload = " << model_payload << '\n'
      << "pml_points = " << opt(pml_points) << '\n'
      << "c_pml = " << fmt(c_pml) << '\n'
      << "source = " << source << '\n'
      << "t = " << opt(t) << '\n'
      << "s = " << opt(s) << '\n'
      << "fprtol = " << fmt(fprtol) << '\n'
      << "exp_action_tol = " << fmt(exp_action_tol) << '\n'
      << "inner_restart = " << inner_restart << '\n'
      << "inner_max_iters = " << inner_max_iters << '\n'
      << "round_parameters = " << (round_parameters ? "true" : "false") << '\n'
      << "outer_rtol = " << fmt(outer_rtol) << '\n'
      << "outer_restart = " << outer_restart << '\n'
      << "outer_max_iters = " << outer_max_iters << '\n'
      << "seed = " << seed << '\n'
      << "output_dir = " << output_dir << '\n'
      << "freqs = " << join(freqs) << '\n'
      << "t_factors = " << join(t_factors) << '\n'
      << "c_pml_values = " << join(c_pml_values) << '\n'
      << "pml_points_values = " << join(pml_points_values) << '\n'
      << "ppw_values = " << join(ppw_values) << '\n'
      << "normalize_spectrum = " << (normalize_spectrum ? "true" : "false") << '\n';
  return out.str();
}

void RunConfig::merge_text(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto triple = [&](std::array<double, 3>& dst) {
      const auto xs = parse_list<double>(key, v);
      if (xs.empty() || xs.size() > 3) throw FormatError("config: '" + key + "' needs 1-3 values");
      for (std::size_t a = 0; a < 3; ++a) dst[a] = a < xs.size() ? xs[a] : dst[a];
    };
    if (key == "command") command = v;
    else if (key == "dim") dim = parse_value<int>(key, v);
    else if (key == "freq") freq = parse_value<double>(key, v);
    else if (key == "ppw") ppw = parse_value<double>(key, v);
    else if (key == "lengths") triple(lengths);
    else if (key == "model") model = v;
    else if (key == "lens_center") triple(lens_center);
    else if (key == "lens_sigma") lens_sigma = parse_value<double>(key, v);
    else if (key == "model_header") model_header = v;
    else if (key == "model_payload") model_payload = v;
    else if (key == "pml_points") {
      pml_points = v == "auto" ? std::nullopt : std::optional<int>(parse_value<int>(key, v));
    }
    else if (key == "c_pml") c_pml = parse_value<double>(key, v);
    else if (key == "source") source = v;
    else if (key == "t") t = v == "auto" ? std::nullopt : std::optional(parse_value<double>(key, v));
    else if (key == "s") s = v == "auto" ? std::nullopt : std::optional(parse_value<double>(key, v));
    else if (key == "fprtol") fprtol = parse_value<double>(key, v);
    else if (key == "exp_action_tol") exp_action_tol = parse_value<double>(key, v);
    else if (key == "inner_restart") inner_restart = parse_value<int>(key, v);
    else if (key == "inner_max_iters") inner_max_iters = parse_value<int>(key, v);
    else if (key == "round_parameters") round_parameters = parse_bool(key, v);
    else if (key == "outer_rtol") outer_rtol = parse_value<double>(key, v);
    else if (key == "outer_restart") outer_restart = parse_value<int>(key, v);
    else if (key == "outer_max_iters") outer_max_iters = parse_value<int>(key, v);
    else if (key == "seed") seed = parse_value<std::uint64_t>(key, v);
    else if (key == "output_dir") output_dir = v;
    else if (key == "freqs") freqs = parse_list<double>(key, v);
    else if (key == "t_factors") t_factors = parse_list<double>(key, v);
    else if (key == "c_pml_values") c_pml_values = parse_list<double>(key, v);
    else if (key == "pml_points_values") pml_points_values = parse_list<int>(key, v);
    else if (key == "ppw_values") ppw_values = parse_list<double>(key, v);
    else if (key == "normalize_spectrum") normalize_spectrum = parse_bool(key, v);
    else throw FormatError("config: unknown key '" + key + "'");
  }
}

RunConfig RunConfig::from_text(const std::string& text)
{
  RunConfig cfg;
  cfg.merge_text(text);
  return cfg;
}

}  // namespace matexpre
