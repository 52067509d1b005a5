#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "litterscan/raster_io.hpp"

namespace litterscan {

/// Binary confusion counts indexed by (truth, prediction).
struct ConfusionMatrix {
  std::uint64_t tn = 0;  // truth 0, predicted 0
  std::uint64_t fp = 0;  // truth 0, predicted 1
  std::uint64_t fn = 0;  // truth 1, predicted 0
  std::uint64_t tp = 0;  // truth 1, predicted 1

  std::uint64_t total() const { return tn + fp + fn + tp; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);
ConfusionMatrix confusion(const LabelMask& predicted, const LabelMask& truth);

/// Derived rates. Recall is per target (truth) class, precision per output
/// (predicted) class; a rate whose denominator is zero is empty.
struct MetricsReport {
  ConfusionMatrix counts;
  double accuracy = 0.0;
  double error_rate = 0.0;
  std::array<std::optional<double>, 2> recall;
  std::array<std::optional<double>, 2> precision;
  /// Share of the total in each cell, as percentages: [tn, fp, fn, tp].
  std::array<double, 4> cell_percent{};
};

MetricsReport metrics(const ConfusionMatrix& m);

/// Percentage rounded to one decimal, as displayed in the text table.
double percent_1dp(double ratio);

/// { counts: {tn, fp, fn, tp}, accuracy, error_rate, recall: [c0, c1],
///   precision: [c0, c1], cell_percent: {...} }; undefined rates are null.
std::string metrics_json(const MetricsReport& report);

/// Text table in the usual plotconfusion arrangement: rows are the output
/// class, columns the target class; each row ends with that output class's
/// precision and its complement, the bottom row holds per-target recall, and
/// the corner holds accuracy / error rate.
std::string metrics_table(const MetricsReport& report, const std::string& title);

}  // namespace litterscan
