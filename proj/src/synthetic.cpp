#include "litterscan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "litterscan/error.hpp"
#include "litterscan/rng.hpp"

namespace litterscan {

namespace {

double gaussian(SplitMix64& rng)
{
  const double u1 = 1.0 - rng.uniform01();  // (0, 1]
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

const std::array<double, kBandCount>& synthetic_background_means()
{
  static const std::array<double, kBandCount> means = {1200, 1000, 800, 600, 550, 500, 480,
                                                       450,  440,  300, 100, 250, 200};
  return means;
}

const std::array<double, kBandCount>& synthetic_plastic_means()
{
  static const std::array<double, kBandCount> means = {1000, 800,  1050, 850, 800, 900, 950,
                                                       1100, 1050, 600,  300, 900, 700};
  return means;
}

SyntheticScene make_synthetic(const SyntheticConfig& cfg)
{
  if (cfg.rows == 0 || cfg.cols == 0) throw Error("synthetic scene must be nonempty");
  if (!(cfg.plastic_fraction > 0.0 && cfg.plastic_fraction < 1.0))
    throw Error("plastic fraction must lie in (0, 1)");
  if (!(cfg.noise_sigma >= 0.0)) throw Error("noise sigma must be nonnegative");

  const std::size_t n = cfg.rows * cfg.cols;
  const auto plastic = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.plastic_fraction));

  SplitMix64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  std::vector<std::uint8_t> labels(n, 0);
  for (std::size_t i = 0; i < plastic; ++i) labels[order[i]] = 1;

  SyntheticScene scene;
  scene.cube.rows = cfg.rows;
  scene.cube.cols = cfg.cols;
  for (const auto& spec : canonical_bands()) scene.cube.band_order.push_back(spec.id);
  scene.cube.values.resize(n * kBandCount);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& means = labels[p] ? synthetic_plastic_means() : synthetic_background_means();
    for (std::size_t b = 0; b < kBandCount; ++b) {
      const double v = std::round(means[b] + cfg.noise_sigma * gaussian(rng));
      scene.cube.values[p * kBandCount + b] = static_cast<float>(std::clamp(v, 0.0, 4095.0));
    }
  }
  scene.truth = LabelMask(cfg.rows, cfg.cols, std::move(labels));
  return scene;
}

}  // namespace litterscan
