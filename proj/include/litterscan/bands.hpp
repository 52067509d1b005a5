#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace litterscan {

/// Spectral band metadata of the Sentinel-2 MSI sensor.
struct BandSpec {
  std::string id;
  double wavelength_nm = 0.0;
  double native_gsd_m = 0.0;

  bool operator==(const BandSpec&) const = default;
};

inline constexpr std::size_t kBandCount = 13;

/// The 13 MSI bands in canonical order (B1..B12 with B8A after B8).
const std::array<BandSpec, kBandCount>& canonical_bands();

/// Position of `id` in the canonical order, or nullopt for unknown ids.
std::optional<std::size_t> canonical_index(std::string_view id);

/// Canonical spec for `id`; throws Error for unknown ids.
const BandSpec& band_spec(std::string_view id);

}  // namespace litterscan
