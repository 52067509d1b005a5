#include "litterscan/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "litterscan/error.hpp"
#include "litterscan/rng.hpp"

namespace litterscan {

using json = nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::size_t kLeafBlock = 64;

// Above 36 the logistic rounds to exactly 1.0; saturate just below that so
// the output stays inside the open interval.
double logistic(double z)
{
  z = std::clamp(z, -700.0, 36.0);
  return 1.0 / (1.0 + std::exp(-z));
}

struct Activations {
  std::array<double, kHidden> hidden{};
  double output = 0.0;
};

Activations run(const Weights& w, std::span<const double, kInputs> x)
{
  Activations a;
  double z = w[kOutputOffset + kHidden];
  for (std::size_t j = 0; j < kHidden; ++j) {
    const double* row = &w[j * kHiddenStride];
    double s = row[kInputs];
    for (std::size_t i = 0; i < kInputs; ++i) s += row[i] * x[i];
    a.hidden[j] = std::tanh(s);
    z += w[kOutputOffset + j] * a.hidden[j];
  }
  a.output = logistic(z);
  return a;
}

struct Accumulator {
  double loss = 0.0;
  Weights grad{};

  void add(const Accumulator& other)
  {
    loss += other.loss;
    for (std::size_t k = 0; k < kParamCount; ++k) grad[k] += other.grad[k];
  }
};

// Sum of squared errors and unscaled gradient over samples [begin, end).
template <bool WithGradient>
Accumulator reduce(const Weights& w, const SampleSet& samples, std::size_t begin, std::size_t end)
{
  if (end - begin > kLeafBlock) {
    const std::size_t mid = begin + (end - begin) / 2;
    Accumulator left = reduce<WithGradient>(w, samples, begin, mid);
    left.add(reduce<WithGradient>(w, samples, mid, end));
    return left;
  }
  Accumulator acc;
  for (std::size_t n = begin; n < end; ++n) {
    const auto x = samples.feature(n);
    const Activations a = run(w, x);
    const double err = a.output - static_cast<double>(samples.labels[n]);
    acc.loss += err * err;
    if constexpr (WithGradient) {
      const double dz = 2.0 * err * a.output * (1.0 - a.output);
      for (std::size_t j = 0; j < kHidden; ++j) {
        acc.grad[kOutputOffset + j] += dz * a.hidden[j];
        const double da = dz * w[kOutputOffset + j] * (1.0 - a.hidden[j] * a.hidden[j]);
        double* row = &acc.grad[j * kHiddenStride];
        for (std::size_t i = 0; i < kInputs; ++i) row[i] += da * x[i];
        row[kInputs] += da;
      }
      acc.grad[kOutputOffset + kHidden] += dz;
    }
  }
  return acc;
}

void require_samples(const SampleSet& samples)
{
  if (samples.size() == 0) throw Error("loss/gradient of an empty sample set");
}

template <typename T>
T field(const json& doc, const char* key)
{
  if (!doc.is_object() || !doc.contains(key)) throw Error(std::string("malformed model file: missing '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("malformed model file: invalid '") + key + "'");
  }
}

}  // namespace

MlpModel init_model(std::uint64_t seed, const Normalizer& normalizer, std::vector<std::string> band_order)
{
  MlpModel model;
  model.normalizer = normalizer;
  model.band_order = std::move(band_order);

  SplitMix64 rng(seed);
  const double r_hidden = std::sqrt(6.0 / static_cast<double>(kInputs + kHidden));
  const double r_output = std::sqrt(6.0 / static_cast<double>(kHidden + 1));
  for (std::size_t k = 0; k < kParamCount; ++k) {
    const double r = k < kOutputOffset ? r_hidden : r_output;
    model.weights[k] = rng.uniform(-r, r);
  }
  return model;
}

double forward(const Weights& w, std::span<const double, kInputs> x) { return run(w, x).output; }

double forward(const MlpModel& model, std::span<const double, kInputs> x) { return forward(model.weights, x); }

double loss(const Weights& w, const SampleSet& samples)
{
  require_samples(samples);
  return reduce<false>(w, samples, 0, samples.size()).loss / static_cast<double>(samples.size());
}

double loss(const MlpModel& model, const SampleSet& samples) { return loss(model.weights, samples); }

std::pair<double, Weights> loss_and_gradient(const Weights& w, const SampleSet& samples)
{
  require_samples(samples);
  Accumulator acc = reduce<true>(w, samples, 0, samples.size());
  const double n = static_cast<double>(samples.size());
  for (double& g : acc.grad) g /= n;
  return {acc.loss / n, acc.grad};
}

Weights gradient(const Weights& w, const SampleSet& samples) { return loss_and_gradient(w, samples).second; }

Weights gradient(const MlpModel& model, const SampleSet& samples) { return gradient(model.weights, samples); }

Prediction predict_map(const MlpModel& model, const AlignedCube& cube, double threshold)
{
  if (model.band_order.size() != kInputs) throw Error("model must list 13 input bands");
  std::array<std::size_t, kInputs> source{};
  for (std::size_t b = 0; b < kInputs; ++b) source[b] = cube.band_index(model.band_order[b]);

  const std::size_t nb = cube.n_bands();
  Prediction out;
  out.output = IndexMap{cube.rows, cube.cols, std::vector<double>(cube.rows * cube.cols)};
  std::vector<std::uint8_t> labels(out.output.values.size());
  FeatureVector raw{};
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const float* px = &cube.values[p * nb];
    for (std::size_t b = 0; b < kInputs; ++b) raw[b] = px[source[b]];
    const FeatureVector x = apply_normalizer(model.normalizer, std::span<const double, kInputs>(raw));
    const double y = forward(model.weights, x);
    out.output.values[p] = y;
    labels[p] = y >= threshold ? 1 : 0;
  }
  out.mask = LabelMask(cube.rows, cube.cols, std::move(labels));
  return out;
}

std::string model_to_json(const MlpModel& model)
{
  json hidden = json::array();
  for (std::size_t j = 0; j < kHidden; ++j) {
    hidden.push_back(std::vector<double>(model.weights.begin() + static_cast<std::ptrdiff_t>(j * kHiddenStride),
                                         model.weights.begin() + static_cast<std::ptrdiff_t>((j + 1) * kHiddenStride)));
  }
  const std::vector<double> output(model.weights.begin() + kOutputOffset, model.weights.end());
  json doc = {
      {"schema_version", kSchemaVersion},
      {"shape", {kInputs, kHidden, 1}},
      {"activations", {{"hidden", "tanh"}, {"output", "logistic"}}},
      {"weights_hidden", hidden},
      {"weights_output", output},
      {"normalizer", {{"min", model.normalizer.min}, {"max", model.normalizer.max}}},
      {"band_order", model.band_order},
  };
  return doc.dump(2) + "\n";
}

MlpModel model_from_json(const std::string& text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }

  if (field<int>(doc, "schema_version") != kSchemaVersion) throw Error("unsupported model schema_version");
  if (field<std::vector<std::size_t>>(doc, "shape") != std::vector<std::size_t>{kInputs, kHidden, 1})
    throw Error("model shape must be [13, 10, 1]");
  const json acts = field<json>(doc, "activations");
  if (field<std::string>(acts, "hidden") != "tanh" || field<std::string>(acts, "output") != "logistic")
    throw Error("model activations must be tanh/logistic");

  MlpModel model;
  const auto hidden = field<std::vector<std::vector<double>>>(doc, "weights_hidden");
  const auto output = field<std::vector<double>>(doc, "weights_output");
  if (hidden.size() != kHidden) throw Error("weights_hidden must have 10 rows");
  for (std::size_t j = 0; j < kHidden; ++j) {
    if (hidden[j].size() != kHiddenStride) throw Error("each weights_hidden row must have 14 values");
    std::copy(hidden[j].begin(), hidden[j].end(), model.weights.begin() + static_cast<std::ptrdiff_t>(j * kHiddenStride));
  }
  if (output.size() != kHidden + 1) throw Error("weights_output must have 11 values");
  std::copy(output.begin(), output.end(), model.weights.begin() + kOutputOffset);
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw Error("model weights must be finite");
  }

  const json norm = field<json>(doc, "normalizer");
  const auto mins = field<std::vector<double>>(norm, "min");
  const auto maxs = field<std::vector<double>>(norm, "max");
  if (mins.size() != kInputs || maxs.size() != kInputs) throw Error("normalizer must have 13 min/max values");
  for (std::size_t b = 0; b < kInputs; ++b) {
    if (!(mins[b] < maxs[b])) throw Error("normalizer min must be below max for every band");
    model.normalizer.min[b] = mins[b];
    model.normalizer.max[b] = maxs[b];
  }

  model.band_order = field<std::vector<std::string>>(doc, "band_order");
  if (model.band_order.size() != kInputs) throw Error("band_order must list 13 bands");
  return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path)
{
  write_file_atomic(path, model_to_json(model));
}

MlpModel load_model(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw Error("missing model file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_json(text.str());
}

}  // namespace litterscan
