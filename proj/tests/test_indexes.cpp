#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "litterscan/error.hpp"
#include "litterscan/indexes.hpp"
#include "litterscan/rng.hpp"

using namespace litterscan;

namespace {

AlignedCube cube_of(std::vector<std::string> bands, std::size_t rows, std::size_t cols, std::vector<float> values)
{
  AlignedCube c;
  c.rows = rows;
  c.cols = cols;
  c.band_order = std::move(bands);
  c.values = std::move(values);
  REQUIRE(c.values.size() == rows * cols * c.band_order.size());
  return c;
}

AlignedCube single_pixel(std::vector<std::string> bands, std::vector<float> values)
{
  return cube_of(std::move(bands), 1, 1, std::move(values));
}

}  // namespace

TEST_CASE("normalized_difference examples")
{
  CHECK(normalized_difference(1000, 1000) == 0.0);
  CHECK(normalized_difference(3000, 1000) == 0.5);
  CHECK(normalized_difference(0, 0) == 0.0);
  CHECK(normalized_difference(5, 0) == 1.0);
  CHECK(normalized_difference(0, 5) == -1.0);
  CHECK_THROWS_AS(normalized_difference(-1, 2), Error);
  CHECK_THROWS_AS(normalized_difference(1, std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(normalized_difference(std::nan(""), 1), Error);
}

TEST_CASE("normalized_difference properties")
{
  SplitMix64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double a = rng.uniform(0, 65535);
    const double b = rng.uniform(0, 65535);
    const double k = rng.uniform(1e-3, 1e3);
    const double v = normalized_difference(a, b);
    CHECK(v == -normalized_difference(b, a));
    CHECK(std::abs(normalized_difference(k * a, k * b) - v) <= 1e-12);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("b8b9 index")
{
  CHECK(b8b9_index(single_pixel({"B8", "B9"}, {2000, 2000})).values[0] == 0.0);
  CHECK(b8b9_index(single_pixel({"B8", "B9"}, {3000, 1000})).values[0] == 0.5);
  CHECK_THROWS_AS(b8b9_index(single_pixel({"B8", "B4"}, {1, 1})), Error);

  SplitMix64 rng(2);
  std::vector<float> values(2 * 2 * 3);
  for (auto& v : values) v = static_cast<float>(rng.below(4096));
  const AlignedCube cube = cube_of({"B4", "B8", "B9"}, 2, 2, values);
  const IndexMap map = b8b9_index(cube);
  REQUIRE(map.rows == 2);
  REQUIRE(map.cols == 2);
  for (std::size_t p = 0; p < 4; ++p) {
    const double b8 = values[p * 3 + 1];
    const double b9 = values[p * 3 + 2];
    const double expected = (b8 + b9) == 0 ? 0.0 : (b8 - b9) / (b8 + b9);
    CHECK(map.values[p] == expected);
  }
}

TEST_CASE("resampling overshoot below zero is treated as zero")
{
  CHECK(b8b9_index(single_pixel({"B8", "B9"}, {100, -3.5f})).values[0] == 1.0);
}

TEST_CASE("ndvi")
{
  CHECK(ndvi(single_pixel({"B4", "B8"}, {1234, 1234})).values[0] == 0.0);
  CHECK(ndvi(single_pixel({"B4", "B8"}, {1000, 4000})).values[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(ndvi(single_pixel({"B4", "B8"}, {300, 3500})).values[0] > 0.5);
  CHECK_THROWS_AS(ndvi(single_pixel({"B8", "B9"}, {1, 1})), Error);
}

TEST_CASE("fdi")
{
  // 10 * (842 - 665) / (1610 - 665) = 1770 / 945.
  CHECK(kFdiWavelengthFactor == doctest::Approx(1.87301587302).epsilon(1e-11));

  CHECK(fdi(single_pixel({"B6", "B8", "B11"}, {700, 700, 700})).values[0] == 0.0);

  const float b8 = 0.05f * 4096;
  const float b6 = 0.03f * 4096;
  const float b11 = 0.01f * 4096;
  // 204.8 - (122.88 + (40.96 - 122.88) * 1770 / 945) in exact arithmetic;
  // the float32 cube quantizes the inputs at ~1e-8 relative.
  CHECK(fdi(single_pixel({"B6", "B8", "B11"}, {b6, b8, b11})).values[0] ==
        doctest::Approx(235.3574603175).epsilon(1e-7));
  CHECK_THROWS_AS(fdi(single_pixel({"B6", "B8"}, {1, 1})), Error);
}

TEST_CASE("fdi is positively homogeneous")
{
  SplitMix64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const float b6 = static_cast<float>(rng.below(4096));
    const float b8 = static_cast<float>(rng.below(4096));
    const float b11 = static_cast<float>(rng.below(4096));
    const double base = fdi(single_pixel({"B6", "B8", "B11"}, {b6, b8, b11})).values[0];
    // Power-of-two scaling is exact in binary floating point.
    for (float k : {0.25f, 2.0f, 8.0f}) {
      CHECK(fdi(single_pixel({"B6", "B8", "B11"}, {k * b6, k * b8, k * b11})).values[0] == k * base);
    }
    const float k = static_cast<float>(rng.uniform(0.1, 10.0));
    const double scaled = fdi(single_pixel({"B6", "B8", "B11"}, {k * b6, k * b8, k * b11})).values[0];
    // k * band rounds to float32, and FDI cancels terms of size ~k * 4096.
    CHECK(std::abs(scaled - k * base) <= 1e-6 * k * 4096.0 * 4.0);
  }
}

TEST_CASE("combined index mask")
{
  const std::vector<std::string> bands{"B4", "B6", "B8", "B11"};
  SUBCASE("single pixel decisions")
  {
    // FDI = 0 here.
    CHECK(combined_index_mask(single_pixel(bands, {500, 600, 600, 600}), 0.5, 10.0).labels[0] == 0);
    // FDI = 600 - (100 + (100 - 100) * f) = 500, NDVI = (600-500)/1100 ~ 0.09.
    CHECK(combined_index_mask(single_pixel(bands, {500, 100, 600, 100}), 0.5, 10.0).labels[0] == 1);
    // Same pixel but vegetation threshold excludes it.
    CHECK(combined_index_mask(single_pixel(bands, {500, 100, 600, 100}), 0.0, 10.0).labels[0] == 0);
  }
  SUBCASE("water scene with one debris pixel")
  {
    // Water: B4 300, B6 200, B8 150, B11 100 -> FDI = 150 - (200 - 100 f) ~ 137,
    // NDVI < 0. Debris: B8 raised to 900 -> FDI ~ 887, NDVI 0.5.
    const std::size_t rows = 6;
    const std::size_t cols = 7;
    std::vector<float> values;
    for (std::size_t p = 0; p < rows * cols; ++p) {
      const bool debris = p == 3 * cols + 5;
      values.insert(values.end(), {300, 200, debris ? 900.0f : 150.0f, 100});
    }
    const LabelMask mask = combined_index_mask(cube_of(bands, rows, cols, values), 0.6, 300.0);
    for (std::size_t p = 0; p < rows * cols; ++p) CHECK(mask.labels[p] == (p == 3 * cols + 5 ? 1 : 0));
  }
  SUBCASE("missing bands")
  {
    CHECK_THROWS_AS(combined_index_mask(single_pixel({"B4", "B8"}, {1, 1}), 0.5, 0.0), Error);
  }
  SUBCASE("non-finite thresholds")
  {
    CHECK_THROWS_AS(combined_index_mask(single_pixel(bands, {1, 1, 1, 1}), std::nan(""), 0.0), Error);
  }
}

TEST_CASE("threshold_map")
{
  const IndexMap map{1, 2, {-0.2, 0.5}};
  CHECK(threshold_map(map, 0.0).labels == std::vector<std::uint8_t>{0, 1});
  CHECK(threshold_map(map, 0.5).labels == std::vector<std::uint8_t>{0, 1});

  SplitMix64 rng(4);
  IndexMap random{8, 8, std::vector<double>(64)};
  for (auto& v : random.values) v = rng.uniform(-1, 1);
  for (auto v : threshold_map(random, -2).labels) CHECK(v == 1);
  for (auto v : threshold_map(random, 2).labels) CHECK(v == 0);

  // Raising t never adds positives.
  std::vector<std::uint8_t> prev = threshold_map(random, -1.0).labels;
  for (double t = -0.9; t <= 1.0; t += 0.1) {
    const auto cur = threshold_map(random, t).labels;
    for (std::size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] <= prev[i]);
    prev = cur;
  }
}
