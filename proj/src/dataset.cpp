#include "litterscan/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "litterscan/error.hpp"
#include "litterscan/rng.hpp"

namespace litterscan {

namespace {

SampleSet subset(const SampleSet& set, std::span<const std::size_t> indices)
{
  SampleSet out;
  out.band_order = set.band_order;
  out.features.reserve(indices.size() * kFeatureCount);
  out.labels.reserve(indices.size());
  for (auto i : indices) out.push_back(set.feature(i), set.labels[i]);
  return out;
}

void check_split_spec(const SplitSpec& spec)
{
  for (double f : {spec.train_frac, spec.val_frac, spec.test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw Error("split fractions must lie in (0, 1)");
  }
  if (std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9)
    throw Error("split fractions must sum to 1");
}

template <typename T>
FeatureVector normalize_one(const Normalizer& norm, std::span<const T, kFeatureCount> v)
{
  FeatureVector out{};
  for (std::size_t b = 0; b < kFeatureCount; ++b) {
    out[b] = 2.0 * (static_cast<double>(v[b]) - norm.min[b]) / (norm.max[b] - norm.min[b]) - 1.0;
  }
  return out;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& data) : data_(data) {}

  std::uint64_t uint(int bytes)
  {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * b);
    return v;
  }

  std::string text(std::size_t n)
  {
    need(n);
    std::string s(data_.begin() + static_cast<std::ptrdiff_t>(pos_), data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const
  {
    if (pos_ + n > data_.size()) throw Error("truncated sample table");
  }

  const std::vector<std::uint8_t>& data_;
  std::size_t pos_ = 0;
};

}  // namespace

void SampleSet::push_back(std::span<const double, kFeatureCount> x, std::uint8_t label)
{
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

std::size_t SampleSet::count(std::uint8_t label) const
{
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

SampleSet extract_samples(const AlignedCube& cube, const LabelMask& mask)
{
  if (cube.n_bands() != kFeatureCount)
    throw Error("sample extraction needs a 13-band cube, got " + std::to_string(cube.n_bands()) + " bands");
  if (mask.rows != cube.rows || mask.cols != cube.cols) throw Error("mask dimensions do not match the cube grid");

  SampleSet out;
  out.band_order = cube.band_order;
  out.features.assign(cube.values.begin(), cube.values.end());
  out.labels = mask.labels;
  return out;
}

SampleSet balance(const SampleSet& set, std::uint64_t seed)
{
  std::vector<std::size_t> negatives;
  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < set.size(); ++i) (set.labels[i] ? positives : negatives).push_back(i);
  if (negatives.empty() || positives.empty()) throw Error("cannot balance: a class has no samples");
  if (negatives.size() == positives.size()) return set;

  auto& majority = negatives.size() > positives.size() ? negatives : positives;
  const auto& minority = negatives.size() > positives.size() ? positives : negatives;
  const std::size_t keep = minority.size();

  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(majority.size() - i));
    std::swap(majority[i], majority[j]);
  }

  std::vector<std::size_t> retained(minority.begin(), minority.end());
  retained.insert(retained.end(), majority.begin(), majority.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(retained.begin(), retained.end());
  return subset(set, retained);
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec)
{
  check_split_spec(spec);
  // The small epsilon keeps exact products such as 100 * 0.15 from flooring
  // to 14 through representation error.
  const auto part = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  const std::size_t train = std::min(part(spec.train_frac), n);
  const std::size_t val = std::min(part(spec.val_frac), n - train);
  return {train, val, n - train - val};
}

Split split(const SampleSet& set, const SplitSpec& spec)
{
  if (set.size() == 0) throw Error("cannot split an empty sample set");
  const auto sizes = split_sizes(set.size(), spec);

  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(spec.seed);
  rng.shuffle(std::span(order));

  const std::span<const std::size_t> all(order);
  return Split{subset(set, all.subspan(0, sizes[0])), subset(set, all.subspan(sizes[0], sizes[1])),
               subset(set, all.subspan(sizes[0] + sizes[1]))};
}

Normalizer fit_normalizer(const SampleSet& train)
{
  if (train.size() == 0) throw Error("cannot fit a normalizer on an empty set");
  Normalizer norm;
  norm.min.fill(std::numeric_limits<double>::infinity());
  norm.max.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto x = train.feature(i);
    for (std::size_t b = 0; b < kFeatureCount; ++b) {
      norm.min[b] = std::min(norm.min[b], x[b]);
      norm.max[b] = std::max(norm.max[b], x[b]);
    }
  }
  for (std::size_t b = 0; b < kFeatureCount; ++b) {
    if (!(norm.min[b] < norm.max[b])) {
      const std::string id = b < train.band_order.size() ? train.band_order[b] : std::to_string(b);
      throw Error("band " + id + " is constant over the training set; cannot normalize");
    }
  }
  return norm;
}

FeatureVector apply_normalizer(const Normalizer& norm, std::span<const double, kFeatureCount> v)
{
  return normalize_one(norm, v);
}

FeatureVector apply_normalizer(const Normalizer& norm, std::span<const float, kFeatureCount> v)
{
  return normalize_one(norm, v);
}

SampleSet apply_normalizer(const Normalizer& norm, const SampleSet& set)
{
  SampleSet out;
  out.band_order = set.band_order;
  out.features.reserve(set.features.size());
  out.labels = set.labels;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto x = normalize_one(norm, set.feature(i));
    out.features.insert(out.features.end(), x.begin(), x.end());
  }
  return out;
}

void save_samples(const SampleSet& set, const std::filesystem::path& path)
{
  if (set.band_order.size() != kFeatureCount) throw Error("sample set must carry 13 band ids");
  std::vector<std::uint8_t> out;
  out.reserve(64 + set.size() * (kFeatureCount * 4 + 1));
  const std::uint64_t n = set.size();
  put_u32(out, static_cast<std::uint32_t>(n));
  put_u32(out, static_cast<std::uint32_t>(n >> 32));
  put_u32(out, static_cast<std::uint32_t>(kFeatureCount));
  for (const auto& id : set.band_order) {
    out.push_back(static_cast<std::uint8_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (double v : set.feature(i)) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    out.push_back(set.labels[i]);
  }
  write_file_atomic(path, out);
}

SampleSet load_samples(const std::filesystem::path& path)
{
  const auto data = read_file_bytes(path);
  ByteReader in(data);
  const std::uint64_t n = in.uint(8);
  if (in.uint(4) != kFeatureCount) throw Error("sample table must have 13 features");
  SampleSet set;
  for (std::size_t b = 0; b < kFeatureCount; ++b) set.band_order.push_back(in.text(in.uint(1)));
  FeatureVector x{};
  for (std::uint64_t i = 0; i < n; ++i) {
    for (auto& v : x) v = std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4)));
    const auto label = static_cast<std::uint8_t>(in.uint(1));
    if (label > 1) throw Error("sample table label must be 0 or 1");
    set.push_back(x, label);
  }
  if (!in.done()) throw Error("trailing bytes in sample table");
  return set;
}

DatasetReport describe_samples(const SampleSet& extracted, std::size_t parameter_count)
{
  DatasetReport r;
  r.total_samples = extracted.size();
  r.positives = extracted.count(1);
  r.negatives = r.total_samples - r.positives;
  r.samples_per_weight = static_cast<double>(r.total_samples) / static_cast<double>(parameter_count);
  return r;
}

PreparedData prepare_training_data(const AlignedCube& cube, const LabelMask& mask, const SplitSpec& spec,
                                   std::size_t parameter_count)
{
  SplitMix64 seeds(spec.seed);
  const std::uint64_t balance_seed = seeds.next();
  SplitSpec split_spec = spec;
  split_spec.seed = seeds.next();

  const SampleSet extracted = extract_samples(cube, mask);
  PreparedData out;
  out.report = describe_samples(extracted, parameter_count);
  const SampleSet balanced = balance(extracted, balance_seed);
  out.report.balanced_samples = balanced.size();

  Split raw = split(balanced, split_spec);
  out.normalizer = fit_normalizer(raw.train);
  out.parts.train = apply_normalizer(out.normalizer, raw.train);
  out.parts.val = apply_normalizer(out.normalizer, raw.val);
  out.parts.test = apply_normalizer(out.normalizer, raw.test);
  out.report.train = out.parts.train.size();
  out.report.val = out.parts.val.size();
  out.report.test = out.parts.test.size();
  return out;
}

}  // namespace litterscan
