#include "litterscan/resample.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "litterscan/error.hpp"

namespace litterscan {

namespace {

constexpr int kLobes = 3;

double sinc(double t)
{
  if (t == 0.0) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::sin(pt) / pt;
}

struct Taps {
  std::ptrdiff_t first = 0;  // first (unclamped) source index
  double weights[2 * kLobes] = {};
};

// One tap table per output phase; with integer scales there are only `scale`
// distinct phases.
std::vector<Taps> build_taps(int scale)
{
  std::vector<Taps> table(static_cast<std::size_t>(scale));
  for (int phase = 0; phase < scale; ++phase) {
    const double src = (phase + 0.5) / scale - 0.5;
    const auto base = static_cast<std::ptrdiff_t>(std::floor(src));
    Taps& taps = table[static_cast<std::size_t>(phase)];
    taps.first = base - (kLobes - 1);
    double sum = 0.0;
    for (int k = 0; k < 2 * kLobes; ++k) {
      taps.weights[k] = lanczos3_kernel(src - static_cast<double>(taps.first + k));
      sum += taps.weights[k];
    }
    for (double& w : taps.weights) w /= sum;
  }
  return table;
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n)
{
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

void check_scale(int scale)
{
  if (scale != 1 && scale != 2 && scale != 3 && scale != 6)
    throw Error("unsupported resampling scale " + std::to_string(scale) + " (expected 1, 2, 3 or 6)");
}

}  // namespace

double lanczos3_kernel(double x)
{
  const double ax = std::abs(x);
  if (ax >= kLobes) return 0.0;
  if (ax == 0.0) return 1.0;
  if (ax == std::floor(ax)) return 0.0;
  return sinc(x) * sinc(x / kLobes);
}

FloatGrid resample_grid(const FloatGrid& grid, int scale)
{
  check_scale(scale);
  if (scale == 1) return grid;

  const auto s = static_cast<std::size_t>(scale);
  const std::size_t out_rows = grid.rows * s;
  const std::size_t out_cols = grid.cols * s;
  const auto taps = build_taps(scale);

  // Horizontal pass: rows x out_cols.
  std::vector<double> horizontal(grid.rows * out_cols);
  for (std::size_t r = 0; r < grid.rows; ++r) {
    const double* src = grid.values.data() + r * grid.cols;
    double* dst = horizontal.data() + r * out_cols;
    for (std::size_t c = 0; c < out_cols; ++c) {
      const Taps& t = taps[c % s];
      const auto first = static_cast<std::ptrdiff_t>(c / s) + t.first;
      double acc = 0.0;
      for (int k = 0; k < 2 * kLobes; ++k) acc += t.weights[k] * src[clamp_index(first + k, grid.cols)];
      dst[c] = acc;
    }
  }

  // Vertical pass.
  FloatGrid out{out_rows, out_cols, std::vector<double>(out_rows * out_cols)};
  for (std::size_t r = 0; r < out_rows; ++r) {
    const Taps& t = taps[r % s];
    const auto first = static_cast<std::ptrdiff_t>(r / s) + t.first;
    double* dst = out.values.data() + r * out_cols;
    for (int k = 0; k < 2 * kLobes; ++k) {
      const double w = t.weights[k];
      const double* src = horizontal.data() + clamp_index(first + k, grid.rows) * out_cols;
      for (std::size_t c = 0; c < out_cols; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

FloatGrid resample_band(const Band& band, int scale)
{
  check_scale(scale);
  FloatGrid grid{band.rows, band.cols, std::vector<double>(band.pixels.begin(), band.pixels.end())};
  return resample_grid(grid, scale);
}

AlignedCube align_stack(const BandStack& stack)
{
  const auto& bands = stack.bands();
  if (bands.empty()) throw Error("cannot align an empty stack");

  double finest = bands.front().spec.native_gsd_m;
  for (const auto& b : bands) finest = std::min(finest, b.spec.native_gsd_m);
  const double grid_cells = stack.extent_m() / finest;
  const auto side = static_cast<std::size_t>(std::llround(grid_cells));

  AlignedCube cube;
  cube.rows = side;
  cube.cols = side;
  for (const auto& b : bands) cube.band_order.push_back(b.spec.id);
  const std::size_t nb = bands.size();
  cube.values.assign(side * side * nb, 0.0f);

  for (std::size_t bi = 0; bi < nb; ++bi) {
    const Band& band = bands[bi];
    const double ratio = band.spec.native_gsd_m / finest;
    const auto scale = static_cast<int>(std::lround(ratio));
    if (std::abs(ratio - scale) > 1e-9 || band.rows * static_cast<std::size_t>(scale) != side ||
        band.cols * static_cast<std::size_t>(scale) != side) {
      throw Error("band " + band.spec.id + ": extent inconsistent with the finest grid");
    }
    if (scale == 1) {
      for (std::size_t i = 0; i < band.pixels.size(); ++i) cube.values[i * nb + bi] = band.pixels[i];
      continue;
    }
    const FloatGrid up = resample_band(band, scale);
    for (std::size_t i = 0; i < up.values.size(); ++i) cube.values[i * nb + bi] = static_cast<float>(up.values[i]);
  }
  return cube;
}

std::size_t AlignedCube::band_index(std::string_view id) const
{
  for (std::size_t i = 0; i < band_order.size(); ++i) {
    if (band_order[i] == id) return i;
  }
  throw Error("cube is missing band " + std::string(id));
}

FloatGrid AlignedCube::plane(std::string_view id) const
{
  const std::size_t b = band_index(id);
  FloatGrid out{rows, cols, std::vector<double>(rows * cols)};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = values[i * n_bands() + b];
  return out;
}

void write_cube(const AlignedCube& cube, const std::filesystem::path& path)
{
  if (cube.values.size() != cube.rows * cube.cols * cube.n_bands()) throw Error("cube size does not match its shape");
  std::vector<std::uint8_t> bytes(cube.values.size() * 4);
  for (std::size_t i = 0; i < cube.values.size(); ++i) {
    if (!std::isfinite(cube.values[i])) throw Error("cube contains a non-finite value");
    const auto bits = std::bit_cast<std::uint32_t>(cube.values[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  const nlohmann::json meta = {
      {"rows", cube.rows}, {"cols", cube.cols}, {"band_order", cube.band_order}, {"layout", "bip"}};
  write_file_atomic(path, bytes);
  write_file_atomic(sidecar_path(path), meta.dump() + "\n");
}

AlignedCube read_cube(const std::filesystem::path& path)
{
  nlohmann::json meta;
  {
    std::ifstream in(sidecar_path(path));
    if (!in) throw Error("missing cube sidecar " + sidecar_path(path).string());
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed cube sidecar: " + std::string(e.what()));
    }
  }
  AlignedCube cube;
  try {
    cube.rows = meta.at("rows").get<std::size_t>();
    cube.cols = meta.at("cols").get<std::size_t>();
    cube.band_order = meta.at("band_order").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed cube sidecar: " + std::string(e.what()));
  }
  if (meta.contains("layout") && meta["layout"] != "bip") throw Error("unsupported cube layout");
  if (cube.band_order.empty()) throw Error("cube has no bands");

  const auto bytes = read_file_bytes(path);
  if (bytes.size() != cube.rows * cube.cols * cube.n_bands() * 4)
    throw Error(path.string() + ": payload size does not match sidecar");
  cube.values.resize(cube.rows * cube.cols * cube.n_bands());
  for (std::size_t i = 0; i < cube.values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    cube.values[i] = std::bit_cast<float>(bits);
  }
  return cube;
}

}  // namespace litterscan
