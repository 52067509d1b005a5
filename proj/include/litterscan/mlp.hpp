#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "litterscan/dataset.hpp"
#include "litterscan/indexes.hpp"
#include "litterscan/resample.hpp"

namespace litterscan {

inline constexpr std::size_t kInputs = kFeatureCount;
inline constexpr std::size_t kHidden = 10;
inline constexpr std::size_t kHiddenStride = kInputs + 1;           // 13 weights + bias
inline constexpr std::size_t kOutputOffset = kHidden * kHiddenStride;  // 140
inline constexpr std::size_t kParamCount = kOutputOffset + kHidden + 1;

static_assert(kParamCount == 151);

/// Flat parameter vector. Hidden neuron j occupies [j*14, j*14+14): its 13
/// input weights then its bias. The output neuron follows at [140, 151): 10
/// hidden weights then its bias.
using Weights = std::array<double, kParamCount>;

/// 13-10-1 perceptron: tanh hidden layer, logistic output, together with the
/// input scaling it was trained with.
struct MlpModel {
  Weights weights{};
  Normalizer normalizer;
  std::vector<std::string> band_order;

  double& hidden(std::size_t neuron, std::size_t input) { return weights[neuron * kHiddenStride + input]; }
  double hidden(std::size_t neuron, std::size_t input) const { return weights[neuron * kHiddenStride + input]; }
  double& output(std::size_t hidden_unit) { return weights[kOutputOffset + hidden_unit]; }
  double output(std::size_t hidden_unit) const { return weights[kOutputOffset + hidden_unit]; }

  static constexpr std::size_t parameter_count() { return kParamCount; }
};

/// Weights uniform in (-r, r), r = sqrt(6 / (fan_in + fan_out)) per layer,
/// drawn in flat-layout order from SplitMix64(seed).
MlpModel init_model(std::uint64_t seed, const Normalizer& normalizer, std::vector<std::string> band_order);

/// Network output for an already-normalized input; strictly inside (0, 1).
double forward(const Weights& w, std::span<const double, kInputs> x);
double forward(const MlpModel& model, std::span<const double, kInputs> x);

/// Mean squared error against the 0/1 labels.
double loss(const Weights& w, const SampleSet& samples);
double loss(const MlpModel& model, const SampleSet& samples);

/// Exact gradient of `loss` by backpropagation, in the flat layout.
Weights gradient(const Weights& w, const SampleSet& samples);
Weights gradient(const MlpModel& model, const SampleSet& samples);

/// Loss and gradient in one pass. Sums use a fixed pairwise tree over
/// contiguous sample blocks, so results do not depend on anything but the
/// data order.
std::pair<double, Weights> loss_and_gradient(const Weights& w, const SampleSet& samples);

struct Prediction {
  LabelMask mask;
  IndexMap output;
};

/// Normalizes each pixel with the model's normalizer, runs the network and
/// thresholds the output (mask = output >= threshold).
Prediction predict_map(const MlpModel& model, const AlignedCube& cube, double threshold = 0.5);

/// JSON model document:
/// { schema_version, shape [13,10,1], activations {hidden, output},
///   weights_hidden (10x14), weights_output (11), normalizer {min, max},
///   band_order }.
std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace litterscan
