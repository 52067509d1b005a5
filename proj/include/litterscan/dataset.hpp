#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "litterscan/bands.hpp"
#include "litterscan/raster_io.hpp"
#include "litterscan/resample.hpp"

namespace litterscan {

inline constexpr std::size_t kFeatureCount = kBandCount;

using FeatureVector = std::array<double, kFeatureCount>;

/// Labeled per-pixel feature vectors, stored flat (sample-major).
struct SampleSet {
  std::vector<std::string> band_order;
  std::vector<double> features;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double, kFeatureCount> feature(std::size_t i) const
  {
    return std::span<const double, kFeatureCount>(features.data() + i * kFeatureCount, kFeatureCount);
  }
  void push_back(std::span<const double, kFeatureCount> x, std::uint8_t label);
  std::size_t count(std::uint8_t label) const;
};

/// Per-band min-max scaling to [-1, 1], fitted on training data.
struct Normalizer {
  FeatureVector min{};
  FeatureVector max{};

  bool operator==(const Normalizer&) const = default;
};

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  std::uint64_t seed = 0;
};

struct Split {
  SampleSet train;
  SampleSet val;
  SampleSet test;
};

/// One sample per pixel; requires a 13-band cube and a mask of the same grid.
SampleSet extract_samples(const AlignedCube& cube, const LabelMask& mask);

/// Keeps every minority sample and an equal-size seeded random subset of the
/// majority class (partial Fisher-Yates over the majority indices). Output
/// preserves the input order of the retained samples.
SampleSet balance(const SampleSet& set, std::uint64_t seed);

/// Seeded shuffle, then contiguous partition with sizes floor(n * train_frac),
/// floor(n * val_frac) and the remainder.
Split split(const SampleSet& set, const SplitSpec& spec);

/// Sizes used by `split`, exposed for reports and tests.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

Normalizer fit_normalizer(const SampleSet& train);

/// 2 * (x - min) / (max - min) - 1 per component, no clamping.
FeatureVector apply_normalizer(const Normalizer& norm, std::span<const double, kFeatureCount> v);
FeatureVector apply_normalizer(const Normalizer& norm, std::span<const float, kFeatureCount> v);
SampleSet apply_normalizer(const Normalizer& norm, const SampleSet& set);

/// Flat binary table: u64 count, u32 feature count, band ids (u8 length +
/// bytes each), then per sample 13 little-endian float32 and one label byte.
void save_samples(const SampleSet& set, const std::filesystem::path& path);
SampleSet load_samples(const std::filesystem::path& path);

struct DatasetReport {
  std::size_t total_samples = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t balanced_samples = 0;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  /// Extracted samples per trainable weight; the usual rule of thumb wants > 15.
  double samples_per_weight = 0.0;
};

DatasetReport describe_samples(const SampleSet& extracted, std::size_t parameter_count);

/// Extract -> balance -> split -> fit normalizer on train -> normalize all
/// three parts. Sub-seeds for balance and split are the first two outputs of
/// SplitMix64(seed).
struct PreparedData {
  Split parts;  // normalized
  Normalizer normalizer;
  DatasetReport report;
};

PreparedData prepare_training_data(const AlignedCube& cube, const LabelMask& mask, const SplitSpec& spec,
                                   std::size_t parameter_count);

}  // namespace litterscan
