#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "litterscan/raster_io.hpp"

namespace litterscan {

/// All bands of a stack on one common grid, pixel-interleaved:
/// value of band b at (r, c) is values[(r * cols + c) * band_order.size() + b].
///
/// Stored as float32: digital numbers (<= 65535) are exact, and downstream
/// consumers read float32 containers anyway.
struct AlignedCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::string> band_order;
  std::vector<float> values;

  std::size_t n_bands() const { return band_order.size(); }
  float at(std::size_t r, std::size_t c, std::size_t band) const
  {
    return values[(r * cols + c) * band_order.size() + band];
  }
  /// Index of `id` in band_order; throws Error when absent.
  std::size_t band_index(std::string_view id) const;
  /// One band as a standalone grid.
  FloatGrid plane(std::string_view id) const;
};

/// sinc(x) * sinc(x / 3) on |x| < 3, zero elsewhere. Exactly 1 at 0 and
/// exactly 0 at every other integer.
double lanczos3_kernel(double x);

/// Upsamples by an integer factor in {1, 2, 3, 6} with separable Lanczos3.
/// Pixel centers map as src = (dst + 0.5) / scale - 0.5, source indices are
/// clamped at the borders and each output's weights are divided by their sum.
FloatGrid resample_band(const Band& band, int scale);
FloatGrid resample_grid(const FloatGrid& grid, int scale);

/// Resamples every band onto the finest grid in the stack. Bands already at
/// that resolution are copied through unchanged.
AlignedCube align_stack(const BandStack& stack);

/// Cube container: raw little-endian float32 (pixel-interleaved) plus a
/// `<path>.json` sidecar {"rows", "cols", "band_order", "layout": "bip"}.
void write_cube(const AlignedCube& cube, const std::filesystem::path& path);
AlignedCube read_cube(const std::filesystem::path& path);

}  // namespace litterscan
