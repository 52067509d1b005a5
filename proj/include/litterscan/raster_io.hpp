#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "litterscan/bands.hpp"

namespace litterscan {

/// One spectral band: row-major 16-bit digital numbers.
struct Band {
  BandSpec spec;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

/// Co-registered bands covering one square footprint, kept in canonical order.
///
/// Partial stacks are allowed; operations check for the bands they need.
class BandStack {
 public:
  /// Sorts `bands` into canonical order and validates ids, pixel counts and
  /// footprint geometry. Throws Error on any violation.
  BandStack(std::vector<Band> bands, double extent_m);

  const std::vector<Band>& bands() const { return bands_; }
  double extent_m() const { return extent_m_; }

  /// Null when the stack has no band with this id.
  const Band* find(std::string_view id) const;

 private:
  std::vector<Band> bands_;
  double extent_m_;
};

/// Binary ground-truth raster, 1 = plastic.
struct LabelMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> labels;

  LabelMask() = default;
  /// Throws Error when sizes disagree or a label is not 0/1.
  LabelMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> labels);

  bool operator==(const LabelMask&) const = default;
};

/// Row-major grid of real values (index maps, network outputs, resampled planes).
struct FloatGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Header of a band-stack container, validated but without pixel payloads.
struct ManifestEntry {
  BandSpec spec;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::filesystem::path file;  // resolved against the manifest directory
};

struct Manifest {
  double extent_m = 0.0;
  std::vector<ManifestEntry> bands;  // canonical order
};

/// Parses and validates a manifest. Checks that every payload exists and has
/// exactly rows*cols*2 bytes, but does not read pixels.
Manifest read_manifest(const std::filesystem::path& manifest_path);

BandStack load_stack(const std::filesystem::path& manifest_path);

/// Writes `<dir>/<id>.u16` payloads next to the manifest, then the manifest.
void save_stack(const BandStack& stack, const std::filesystem::path& manifest_path);

/// Reads a binary P5 PGM with maxval 255 or 65535. 8-bit samples are widened
/// without rescaling.
Band import_pgm_band(const std::filesystem::path& path, const BandSpec& spec);

/// P5, maxval 255: label 1 -> 255, label 0 -> 0.
void write_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Inverse of write_mask. Accepts any P5 8-bit PGM whose samples are 0 or 255
/// (or 0/1 for hand-made fixtures).
LabelMask read_mask(const std::filesystem::path& path);

/// Raw little-endian float32 payload plus a `<path>.json` sidecar with
/// rows/cols. Throws on non-finite values.
void write_float_raster(const FloatGrid& grid, const std::filesystem::path& path);
FloatGrid read_float_raster(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames over `path` once complete.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace litterscan
