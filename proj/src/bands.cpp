#include "litterscan/bands.hpp"

#include "litterscan/error.hpp"

namespace litterscan {

const std::array<BandSpec, kBandCount>& canonical_bands()
{
  static const std::array<BandSpec, kBandCount> table = {{
      {"B1", 443.0, 60.0},
      {"B2", 490.0, 10.0},
      {"B3", 560.0, 10.0},
      {"B4", 665.0, 10.0},
      {"B5", 705.0, 20.0},
      {"B6", 740.0, 20.0},
      {"B7", 783.0, 20.0},
      {"B8", 842.0, 10.0},
      {"B8A", 865.0, 20.0},
      {"B9", 945.0, 60.0},
      {"B10", 1375.0, 60.0},
      {"B11", 1610.0, 20.0},
      {"B12", 2190.0, 20.0},
  }};
  return table;
}

std::optional<std::size_t> canonical_index(std::string_view id)
{
  const auto& table = canonical_bands();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].id == id) return i;
  }
  return std::nullopt;
}

const BandSpec& band_spec(std::string_view id)
{
  const auto idx = canonical_index(id);
  if (!idx) throw Error("unknown band id '" + std::string(id) + "'");
  return canonical_bands()[*idx];
}

}  // namespace litterscan
