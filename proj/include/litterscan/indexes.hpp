#pragma once

#include "litterscan/raster_io.hpp"
#include "litterscan/resample.hpp"

namespace litterscan {

using IndexMap = FloatGrid;

/// 10 * (lambda_B8 - lambda_B4) / (lambda_B11 - lambda_B4) with the MSI
/// center wavelengths 842, 665 and 1610 nm.
inline constexpr double kFdiWavelengthFactor = 10.0 * (842.0 - 665.0) / (1610.0 - 665.0);

/// (a - b) / (a + b) for nonnegative a, b. Returns 0 when a + b == 0 so that
/// dark pixels do not inject NaN into maps. Throws Error on negative or
/// non-finite input.
double normalized_difference(double a, double b);

/// (B8 - B9) / (B8 + B9).
IndexMap b8b9_index(const AlignedCube& cube);

/// (B8 - B4) / (B8 + B4).
IndexMap ndvi(const AlignedCube& cube);

/// Floating Debris Index: B8 minus the B6->B11 baseline interpolated at B8,
/// B8 - (B6 + (B11 - B6) * kFdiWavelengthFactor). Unbounded.
IndexMap fdi(const AlignedCube& cube);

/// 1 where FDI >= fdi_min and NDVI <= ndvi_max.
LabelMask combined_index_mask(const AlignedCube& cube, double ndvi_max, double fdi_min);

/// 1 where value >= t.
LabelMask threshold_map(const IndexMap& map, double t);

}  // namespace litterscan
