#include "litterscan/indexes.hpp"

#include <cmath>

#include "litterscan/error.hpp"

namespace litterscan {

namespace {

// Lanczos overshoot can push resampled digital numbers slightly below zero
// next to sharp edges; radiometrically those are zero.
double dn(float v) { return v < 0.0f ? 0.0 : static_cast<double>(v); }

template <typename Fn>
IndexMap per_pixel(const AlignedCube& cube, Fn&& fn)
{
  IndexMap out{cube.rows, cube.cols, std::vector<double>(cube.rows * cube.cols)};
  const std::size_t nb = cube.n_bands();
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = fn(&cube.values[i * nb]);
  return out;
}

IndexMap band_ratio(const AlignedCube& cube, std::string_view a, std::string_view b)
{
  const std::size_t ia = cube.band_index(a);
  const std::size_t ib = cube.band_index(b);
  return per_pixel(cube, [&](const float* px) { return normalized_difference(dn(px[ia]), dn(px[ib])); });
}

}  // namespace

double normalized_difference(double a, double b)
{
  if (!std::isfinite(a) || !std::isfinite(b)) throw Error("normalized difference of non-finite input");
  if (a < 0.0 || b < 0.0) throw Error("normalized difference of negative input");
  const double sum = a + b;
  if (sum == 0.0) return 0.0;
  return (a - b) / sum;
}

IndexMap b8b9_index(const AlignedCube& cube) { return band_ratio(cube, "B8", "B9"); }

IndexMap ndvi(const AlignedCube& cube) { return band_ratio(cube, "B8", "B4"); }

IndexMap fdi(const AlignedCube& cube)
{
  const std::size_t i6 = cube.band_index("B6");
  const std::size_t i8 = cube.band_index("B8");
  const std::size_t i11 = cube.band_index("B11");
  return per_pixel(cube, [&](const float* px) {
    const double b6 = px[i6];
    const double baseline = b6 + (static_cast<double>(px[i11]) - b6) * kFdiWavelengthFactor;
    return static_cast<double>(px[i8]) - baseline;
  });
}

LabelMask combined_index_mask(const AlignedCube& cube, double ndvi_max, double fdi_min)
{
  if (!std::isfinite(ndvi_max) || !std::isfinite(fdi_min)) throw Error("combined index thresholds must be finite");
  const IndexMap veg = ndvi(cube);
  const IndexMap debris = fdi(cube);
  std::vector<std::uint8_t> labels(veg.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = (debris.values[i] >= fdi_min && veg.values[i] <= ndvi_max) ? 1 : 0;
  }
  return LabelMask(cube.rows, cube.cols, std::move(labels));
}

LabelMask threshold_map(const IndexMap& map, double t)
{
  std::vector<std::uint8_t> labels(map.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = map.values[i] >= t ? 1 : 0;
  return LabelMask(map.rows, map.cols, std::move(labels));
}

}  // namespace litterscan
