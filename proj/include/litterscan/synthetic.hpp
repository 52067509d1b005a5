#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "litterscan/bands.hpp"
#include "litterscan/raster_io.hpp"
#include "litterscan/resample.hpp"

namespace litterscan {

struct SyntheticConfig {
  std::size_t rows = 100;
  std::size_t cols = 100;
  double plastic_fraction = 0.15;
  double noise_sigma = 50.0;  // digital numbers, every band
  std::uint64_t seed = 0;
};

/// Mean 13-band spectra (canonical band order, digital numbers) of the two
/// synthetic classes. Every band separates them by at least 4 * noise_sigma
/// at the default sigma.
const std::array<double, kBandCount>& synthetic_background_means();
const std::array<double, kBandCount>& synthetic_plastic_means();

struct SyntheticScene {
  AlignedCube cube;
  LabelMask truth;
};

/// Seeded two-class scene on a single 10 m grid. Exactly
/// round(rows * cols * plastic_fraction) pixels are plastic, chosen by a
/// seeded shuffle. Pixel values are class means plus Gaussian noise, rounded
/// and clamped to the 12-bit range.
SyntheticScene make_synthetic(const SyntheticConfig& cfg);

}  // namespace litterscan
