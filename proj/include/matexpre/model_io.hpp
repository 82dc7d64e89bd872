// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_MODEL_IO_HPP
#define MATEXPRE_MODEL_IO_HPP

#include <array>
#include <filesystem>
#include <string>

#include "matexpre/discretization.hpp"

namespace matexpre
{

/// Plain-text description of a raw little-endian grid payload.
///
///   # comment
///   dims = 676 676 210
///   spacing = 20.0
///   value_type = f32
///   byte_order = little
///   scale_to_unit = 1
///
/// `components` (1 real, 2 interleaved re/im) and `includes_pml` describe
/// solution files written by this library.
struct ModelHeader
{
  int ndim = 1;
  std::array<int, 3> dims{1, 1, 1};
  double spacing = 1.0;
  std::string value_type = "f32";
  std::string byte_order = "little";
  bool scale_to_unit = false;
  int components = 1;
  bool includes_pml = false;

  std::size_t value_size() const;
  std::size_t count() const;
  std::size_t payload_bytes() const { return count() * value_size() * components; }
  void validate() const;

  static ModelHeader parse(const std::string& text);
  std::string to_text() const;
  static ModelHeader read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

/// Reads a real velocity payload described by the header. With
/// scale_to_unit, speeds are divided by their minimum and the factor is kept
/// in scale_factor. dims follow the header (x fastest).
VelocityModel load_velocity_model(const std::filesystem::path& header_path,
                                  const std::filesystem::path& payload_path);

/// Samples a raw model covering the inner domain onto every grid node by
/// nearest neighbour; nodes in the absorbing layers take the value of the
/// nearest inner boundary sample.
VelocityModel fit_model_to_grid(const VelocityModel& raw, const Grid& grid);

/// Writes `stem`.bin (interleaved re/im doubles, lexicographic, layers
/// included) and `stem`.hdr.
void write_solution(const std::filesystem::path& stem, const Grid& grid, const Vector& u);

}  // namespace matexpre

#endif  // MATEXPRE_MODEL_IO_HPP
