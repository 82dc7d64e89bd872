// SPDX-License-Identifier: Apache-2.0

#include "matexpre/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
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

bool parse_flag(const std::string& key, const std::string& value)
{
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw FormatError("model header: '" + key + "' expects a boolean, got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw FormatError("model header: cannot parse '" + value + "' for key '" + key + "'");
  }
  return out;
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T load_little(const char* p)
{
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bits |= static_cast<U>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return std::bit_cast<T>(bits);
}

void store_little(double x, char* p)
{
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (std::size_t b = 0; b < 8; ++b) {
    p[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
}

}  // namespace

std::size_t ModelHeader::value_size() const { return value_type == "f64" ? 8 : 4; }

std::size_t ModelHeader::count() const
{
  std::size_t n = 1;
  for (int a = 0; a < ndim; ++a) n *= static_cast<std::size_t>(dims[a]);
  return n;
}

void ModelHeader::validate() const
{
  if (ndim < 1 || ndim > 3) throw FormatError("model header: dims must list 1 to 3 counts");
  for (int a = 0; a < ndim; ++a) {
    if (dims[a] < 1) throw FormatError("model header: dims must be positive");
  }
  if (!(spacing > 0.0)) throw FormatError("model header: spacing must be positive");
  if (value_type != "f32" && value_type != "f64") {
    throw FormatError("model header: value_type must be f32 or f64, got '" + value_type + "'");
  }
  if (byte_order != "little") {
    throw FormatError("model header: only little byte_order is supported, got '" + byte_order +
                      "'");
  }
  if (components != 1 && components != 2) {
    throw FormatError("model header: components must be 1 or 2");
  }
}

ModelHeader ModelHeader::parse(const std::string& text)
{
  ModelHeader h;
  bool have_dims = false;
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
      throw FormatError("model header line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dims") {
      std::string spaced = value;
      std::replace(spaced.begin(), spaced.end(), 'x', ' ');
      std::replace(spaced.begin(), spaced.end(), ',', ' ');
      std::istringstream ds(spaced);
      int d = 0;
      h.ndim = 0;
      while (ds >> d) {
        if (h.ndim == 3) throw FormatError("model header: more than three dims");
        h.dims[static_cast<std::size_t>(h.ndim++)] = d;
      }
      if (!ds.eof()) throw FormatError("model header: cannot parse dims '" + value + "'");
      have_dims = true;
    }
    else if (key == "spacing") h.spacing = parse_number<double>(key, value);
    else if (key == "value_type") h.value_type = value;
    else if (key == "byte_order") h.byte_order = value;
    else if (key == "scale_to_unit") h.scale_to_unit = parse_flag(key, value);
    else if (key == "components") h.components = parse_number<int>(key, value);
    else if (key == "includes_pml") h.includes_pml = parse_flag(key, value);
    else throw FormatError("model header: unknown key '" + key + "'");
  }
  if (!have_dims) throw FormatError("model header: missing dims");
  h.validate();
  return h;
}

std::string ModelHeader::to_text() const
{
  std::ostringstream out;
  out.precision(17);
  out << "dims =";
  for (int a = 0; a < ndim; ++a) out << ' ' << dims[a];
  out << "\nspacing = " << spacing << "\nvalue_type = " << value_type
      << "\nbyte_order = " << byte_order << "\nscale_to_unit = " << (scale_to_unit ? 1 : 0)
      << "\ncomponents = " << components << "\nincludes_pml = " << (includes_pml ? 1 : 0)
      << '\n';
  return out.str();
}

ModelHeader ModelHeader::read(const std::filesystem::path& path)
{
  return parse(read_file(path));
}

void ModelHeader::write(const std::filesystem::path& path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << to_text();
}

VelocityModel load_velocity_model(const std::filesystem::path& header_path,
                                  const std::filesystem::path& payload_path)
{
  const ModelHeader h = ModelHeader::read(header_path);
  if (h.components != 1) throw FormatError("velocity payload must have one component");
  const std::string bytes = read_file(payload_path);
  if (bytes.size() != h.payload_bytes()) {
    throw FormatError("velocity payload " + payload_path.string() + " has " +
                      std::to_string(bytes.size()) + " bytes; header expects " +
                      std::to_string(h.payload_bytes()));
  }
  std::vector<double> values(h.count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const char* p = bytes.data() + i * h.value_size();
    values[i] = h.value_type == "f64" ? load_little<double>(p)
                                      : static_cast<double>(load_little<float>(p));
  }
  VelocityModel m = VelocityModel::from_values(std::move(values), h.dims);
  return h.scale_to_unit ? normalize_min_speed(m) : m;
}

VelocityModel fit_model_to_grid(const VelocityModel& raw, const Grid& grid)
{
  for (int a = grid.dim; a < 3; ++a) {
    if (raw.dims[a] != 1) {
      throw DimensionError("fit_model_to_grid: model has more axes than the grid");
    }
  }
  std::vector<double> values(grid.unknowns());
  const int nx = grid.axis_points(0);
  const int ny = grid.axis_points(1);
  const int nz = grid.axis_points(2);
  std::size_t idx = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i, ++idx) {
        const std::array<int, 3> ijk{i, j, k};
        std::size_t src = 0;
        std::size_t stride = 1;
        for (int a = 0; a < grid.dim; ++a) {
          const Interval iv = grid.extent[a];
          const double x = std::clamp(grid.coordinate(a, ijk[a]), iv.lo, iv.hi);
          const int n = raw.dims[a];
          const double frac = iv.hi > iv.lo ? (x - iv.lo) / (iv.hi - iv.lo) : 0.0;
          const long r = std::lround(frac * (n - 1));
          src += static_cast<std::size_t>(std::clamp<long>(r, 0, n - 1)) * stride;
          stride *= static_cast<std::size_t>(n);
        }
        values[idx] = raw.values[src];
      }
    }
  }
  VelocityModel out = VelocityModel::from_values(
    std::move(values), {grid.axis_points(0), grid.axis_points(1), grid.axis_points(2)});
  out.scale_factor = raw.scale_factor;
  return out;
}

void write_solution(const std::filesystem::path& stem, const Grid& grid, const Vector& u)
{
  if (u.size() != grid.unknowns()) {
    throw DimensionError("write_solution: vector does not match the grid");
  }
  ModelHeader h;
  h.ndim = grid.dim;
  for (int a = 0; a < grid.dim; ++a) h.dims[a] = grid.axis_points(a);
  h.spacing = grid.h;
  h.value_type = "f64";
  h.components = 2;
  h.includes_pml = true;
  std::string bytes(u.size() * 16, '\0');
  for (std::size_t i = 0; i < u.size(); ++i) {
    store_little(u[i].real(), bytes.data() + 16 * i);
    store_little(u[i].imag(), bytes.data() + 16 * i + 8);
  }
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path hdr = stem;
  hdr += ".hdr";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw FormatError("cannot write " + bin.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  h.write(hdr);
}

}  // namespace matexpre
