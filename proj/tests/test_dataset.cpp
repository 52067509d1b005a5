#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <map>

#include "litterscan/dataset.hpp"
#include "litterscan/error.hpp"
#include "litterscan/mlp.hpp"
#include "litterscan/rng.hpp"
#include "test_support.hpp"

using namespace litterscan;

namespace {

std::vector<std::string> canonical_ids()
{
  std::vector<std::string> ids;
  for (const auto& s : canonical_bands()) ids.push_back(s.id);
  return ids;
}

// Sample i carries feature[0] = i so provenance survives reshuffling.
SampleSet tagged_set(const std::vector<std::uint8_t>& labels)
{
  SampleSet set;
  set.band_order = canonical_ids();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    FeatureVector x{};
    x[0] = static_cast<double>(i);
    for (std::size_t b = 1; b < kFeatureCount; ++b) x[b] = static_cast<double>((i * 31 + b * 7) % 4096);
    set.push_back(x, labels[i]);
  }
  return set;
}

std::vector<std::size_t> tags(const SampleSet& set)
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(static_cast<std::size_t>(set.feature(i)[0]));
  return out;
}

std::vector<std::uint8_t> random_labels(std::size_t n, double p, SplitMix64& rng)
{
  std::vector<std::uint8_t> labels(n);
  for (auto& l : labels) l = rng.uniform01() < p ? 1 : 0;
  return labels;
}

}  // namespace

TEST_CASE("generator matches the reference vectors")
{
  const auto ref = testing::load_json(testing::fixture("rng_reference.json"));
  for (const char* seed_key : {"0", "1"}) {
    const auto& s = ref["seeds"][seed_key];
    const std::uint64_t seed = std::stoull(seed_key);
    SplitMix64 rng(seed);
    for (const auto& hex : s["next_hex"]) CHECK(rng.next() == std::stoull(hex.get<std::string>(), nullptr, 16));

    SplitMix64 bounded(seed);
    for (std::size_t i = 0; i < s["below"].size(); ++i) {
      CHECK(bounded.below(s["below_bounds"][i].get<std::uint64_t>()) == s["below"][i].get<std::uint64_t>());
    }
    SplitMix64 unit(seed);
    for (const auto& u : s["uniform01"]) CHECK(unit.uniform01() == u.get<double>());

    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    SplitMix64(seed).shuffle(std::span(perm));
    CHECK(perm == s["shuffle10"].get<std::vector<int>>());
  }
  // Widely published SplitMix64 output for seed 0.
  CHECK(SplitMix64(0).next() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("balance and split match the reference outputs")
{
  const auto ref = testing::load_json(testing::fixture("rng_reference.json"));
  const auto labels = ref["balance_labels"].get<std::vector<std::uint8_t>>();
  const auto fracs = ref["split_fracs"].get<std::vector<double>>();
  for (const char* seed_key : {"0", "1"}) {
    const auto& s = ref["seeds"][seed_key];
    const std::uint64_t seed = std::stoull(seed_key);
    CHECK(tags(balance(tagged_set(labels), seed)) == s["balance_indices"].get<std::vector<std::size_t>>());

    const SampleSet set = tagged_set(std::vector<std::uint8_t>(ref["split_n"].get<std::size_t>(), 0));
    const Split parts = split(set, SplitSpec{fracs[0], fracs[1], fracs[2], seed});
    CHECK(tags(parts.train) == s["split"]["train"].get<std::vector<std::size_t>>());
    CHECK(tags(parts.val) == s["split"]["val"].get<std::vector<std::size_t>>());
    CHECK(tags(parts.test) == s["split"]["test"].get<std::vector<std::size_t>>());
  }
}

TEST_CASE("extract_samples")
{
  AlignedCube cube;
  cube.rows = 2;
  cube.cols = 2;
  cube.band_order = canonical_ids();
  cube.values.resize(4 * 13);
  for (std::size_t i = 0; i < cube.values.size(); ++i) cube.values[i] = static_cast<float>(i);

  const SampleSet set = extract_samples(cube, LabelMask(2, 2, {1, 0, 0, 1}));
  CHECK(set.size() == 4);
  CHECK(set.labels == std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(set.band_order == cube.band_order);
  CHECK(set.feature(2)[5] == 2 * 13 + 5);

  CHECK_THROWS_AS(extract_samples(cube, LabelMask(3, 3, std::vector<std::uint8_t>(9, 0))), Error);
  cube.band_order.pop_back();
  CHECK_THROWS_AS(extract_samples(cube, LabelMask(2, 2, {1, 0, 0, 1})), Error);
}

TEST_CASE("full 60 m grid yields 3,348,900 samples")
{
  AlignedCube cube;
  cube.rows = 1830;
  cube.cols = 1830;
  cube.band_order = canonical_ids();
  cube.values.assign(cube.rows * cube.cols * 13, 0.0f);
  const SampleSet set = extract_samples(cube, LabelMask(1830, 1830, std::vector<std::uint8_t>(1830 * 1830, 0)));
  CHECK(set.size() == 3348900);
  const DatasetReport report = describe_samples(set, kParamCount);
  CHECK(report.samples_per_weight > 15.0);
  CHECK(report.samples_per_weight == doctest::Approx(3348900.0 / 151.0));
}

TEST_CASE("balance")
{
  SUBCASE("900 negatives and 100 positives")
  {
    std::vector<std::uint8_t> labels(1000, 0);
    for (std::size_t i = 0; i < 100; ++i) labels[i * 10 + 3] = 1;
    const SampleSet set = tagged_set(labels);
    const SampleSet out = balance(set, 42);
    CHECK(out.count(0) == 100);
    CHECK(out.count(1) == 100);
    // Every positive kept.
    const auto kept = tags(out);
    for (std::size_t i = 0; i < 100; ++i) CHECK(std::binary_search(kept.begin(), kept.end(), i * 10 + 3));
    // Retained samples keep their input order.
    CHECK(std::is_sorted(kept.begin(), kept.end()));
    // Determinism.
    CHECK(balance(set, 42).features == out.features);
    CHECK(balance(set, 43).features != out.features);
  }
  SUBCASE("already balanced is unchanged")
  {
    std::vector<std::uint8_t> labels(100, 0);
    std::fill(labels.begin() + 50, labels.end(), 1);
    const SampleSet set = tagged_set(labels);
    const SampleSet out = balance(set, 7);
    CHECK(out.features == set.features);
    CHECK(out.labels == set.labels);
  }
  SUBCASE("minority positives or negatives")
  {
    SplitMix64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const auto labels = random_labels(1 + rng.below(300), rng.uniform(0.05, 0.95), rng);
      const SampleSet set = tagged_set(labels);
      const std::size_t pos = set.count(1);
      const std::size_t neg = set.count(0);
      if (pos == 0 || neg == 0) {
        CHECK_THROWS_AS(balance(set, trial), Error);
        continue;
      }
      const SampleSet out = balance(set, static_cast<std::uint64_t>(trial));
      CHECK(out.count(0) == out.count(1));
      CHECK(out.size() == 2 * std::min(pos, neg));
    }
  }
  SUBCASE("empty class") { CHECK_THROWS_AS(balance(tagged_set({0, 0, 0}), 1), Error); }
}

TEST_CASE("split")
{
  SUBCASE("sizes")
  {
    CHECK(split_sizes(100, {}) == std::array<std::size_t, 3>{70, 15, 15});
    CHECK(split_sizes(10, {}) == std::array<std::size_t, 3>{7, 1, 2});
    CHECK(split_sizes(3000, {}) == std::array<std::size_t, 3>{2100, 450, 450});
    CHECK(split_sizes(1, {}) == std::array<std::size_t, 3>{0, 0, 1});
  }
  SUBCASE("partition property")
  {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 1 + rng.below(500);
      const SampleSet set = tagged_set(random_labels(n, 0.3, rng));
      const double tr = rng.uniform(0.1, 0.8);
      const double va = rng.uniform(0.05, (1.0 - tr) * 0.9);
      const SplitSpec spec{tr, va, 1.0 - tr - va, rng.next()};
      const Split parts = split(set, spec);

      CHECK(std::abs(static_cast<double>(parts.train.size()) - static_cast<double>(n) * tr) <= 1.0);
      CHECK(std::abs(static_cast<double>(parts.val.size()) - static_cast<double>(n) * va) <= 1.0);
      std::vector<std::size_t> all = tags(parts.train);
      for (const auto* part : {&parts.val, &parts.test}) {
        const auto t = tags(*part);
        all.insert(all.end(), t.begin(), t.end());
      }
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(n);
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      CHECK(all == expected);  // disjoint and complete
      // Labels travel with their features.
      for (std::size_t i = 0; i < parts.train.size(); ++i) {
        CHECK(parts.train.labels[i] == set.labels[static_cast<std::size_t>(parts.train.feature(i)[0])]);
      }
    }
  }
  SUBCASE("errors")
  {
    CHECK_THROWS_AS(split(SampleSet{}, {}), Error);
    CHECK_THROWS_AS(split(tagged_set({0, 1}), SplitSpec{0.5, 0.3, 0.3, 0}), Error);
    CHECK_THROWS_AS(split(tagged_set({0, 1}), SplitSpec{1.0, 0.0, 0.0, 0}), Error);
  }
}

TEST_CASE("normalizer")
{
  SampleSet set;
  set.band_order = canonical_ids();
  FeatureVector lo{};
  FeatureVector hi{};
  for (std::size_t b = 0; b < kFeatureCount; ++b) {
    lo[b] = 0;
    hi[b] = 4095 - static_cast<double>(b);
  }
  set.push_back(lo, 0);
  set.push_back(hi, 1);
  FeatureVector mid{};
  for (std::size_t b = 0; b < kFeatureCount; ++b) mid[b] = 1000;
  set.push_back(mid, 0);

  const Normalizer norm = fit_normalizer(set);
  CHECK(norm.min[0] == 0);
  CHECK(norm.max[0] == 4095);

  FeatureVector center{};
  for (std::size_t b = 0; b < kFeatureCount; ++b) center[b] = (norm.min[b] + norm.max[b]) / 2;
  for (double v : apply_normalizer(norm, std::span<const double, kFeatureCount>(lo))) CHECK(v == -1.0);
  for (double v : apply_normalizer(norm, std::span<const double, kFeatureCount>(hi))) CHECK(v == 1.0);
  for (double v : apply_normalizer(norm, std::span<const double, kFeatureCount>(center))) CHECK(v == 0.0);

  const SampleSet normalized = apply_normalizer(norm, set);
  for (double v : normalized.features) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }

  // Out-of-range values are not clamped.
  FeatureVector beyond{};
  beyond.fill(8190);
  CHECK(apply_normalizer(norm, std::span<const double, kFeatureCount>(beyond))[0] > 1.0);

  SUBCASE("strictly monotone per component")
  {
    SplitMix64 rng(3);
    for (int i = 0; i < 1000; ++i) {
      FeatureVector a{};
      FeatureVector b{};
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        a[k] = rng.uniform(-1000, 5000);
        b[k] = a[k] + rng.uniform(1e-3, 100);
      }
      const auto na = apply_normalizer(norm, std::span<const double, kFeatureCount>(a));
      const auto nb = apply_normalizer(norm, std::span<const double, kFeatureCount>(b));
      for (std::size_t k = 0; k < kFeatureCount; ++k) CHECK(na[k] < nb[k]);
    }
  }
  SUBCASE("constant band rejected")
  {
    SampleSet flat;
    flat.band_order = canonical_ids();
    flat.push_back(lo, 0);
    flat.push_back(lo, 1);
    CHECK_THROWS_WITH_AS(fit_normalizer(flat), doctest::Contains("constant"), Error);
    CHECK_THROWS_AS(fit_normalizer(SampleSet{}), Error);
  }
}

TEST_CASE("sample table round trip")
{
  SplitMix64 rng(4);
  SampleSet set = tagged_set(random_labels(57, 0.4, rng));
  for (auto& v : set.features) v = static_cast<float>(rng.uniform(-2, 4095));
  const testing::TempDir dir;
  save_samples(set, dir / "s.bin");
  const auto bytes = testing::read_bytes(dir / "s.bin");
  std::size_t header = 8 + 4;
  for (const auto& id : set.band_order) header += 1 + id.size();
  CHECK(bytes.size() == header + 57 * (13 * 4 + 1));
  const SampleSet back = load_samples(dir / "s.bin");
  CHECK(back.band_order == set.band_order);
  CHECK(back.labels == set.labels);
  CHECK(back.features == set.features);

  auto truncated = bytes;
  truncated.pop_back();
  testing::write_bytes(dir / "t.bin", truncated);
  CHECK_THROWS_AS(load_samples(dir / "t.bin"), Error);
}

TEST_CASE("prepare_training_data")
{
  AlignedCube cube;
  cube.rows = 20;
  cube.cols = 20;
  cube.band_order = canonical_ids();
  SplitMix64 rng(5);
  cube.values.resize(400 * 13);
  for (auto& v : cube.values) v = static_cast<float>(rng.below(4096));
  std::vector<std::uint8_t> labels(400, 0);
  for (std::size_t i = 0; i < 60; ++i) labels[i * 6] = 1;

  const PreparedData data = prepare_training_data(cube, LabelMask(20, 20, labels), SplitSpec{0.7, 0.15, 0.15, 9},
                                                  kParamCount);
  CHECK(data.report.total_samples == 400);
  CHECK(data.report.positives == 60);
  CHECK(data.report.balanced_samples == 120);
  CHECK(data.report.train == 84);
  CHECK(data.report.val == 18);
  CHECK(data.report.test == 18);
  for (double v : data.parts.train.features) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  const PreparedData again = prepare_training_data(cube, LabelMask(20, 20, labels), SplitSpec{0.7, 0.15, 0.15, 9},
                                                   kParamCount);
  CHECK(again.parts.test.features == data.parts.test.features);
  CHECK(again.normalizer == data.normalizer);
}
