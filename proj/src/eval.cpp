#include "litterscan/eval.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "litterscan/error.hpp"

namespace litterscan {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den)
{
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json optional_json(const std::optional<double>& v)
{
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string pct(const std::optional<double>& v)
{
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << percent_1dp(*v) << "%";
  return os.str();
}

std::string cell(std::uint64_t count, double share)
{
  std::ostringstream os;
  os << count << " " << std::fixed << std::setprecision(1) << share << "%";
  return os.str();
}

}  // namespace

ConfusionMatrix confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth)
{
  if (predicted.size() != truth.size()) throw Error("confusion: predicted and truth sizes differ");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (t) {
      (p ? m.tp : m.fn) += 1;
    } else {
      (p ? m.fp : m.tn) += 1;
    }
  }
  return m;
}

ConfusionMatrix confusion(const LabelMask& predicted, const LabelMask& truth)
{
  if (predicted.rows != truth.rows || predicted.cols != truth.cols)
    throw Error("confusion: mask dimensions differ");
  return confusion(std::span(predicted.labels), std::span(truth.labels));
}

MetricsReport metrics(const ConfusionMatrix& m)
{
  const std::uint64_t total = m.total();
  if (total == 0) throw Error("metrics of an empty confusion matrix");
  MetricsReport r;
  r.counts = m;
  r.accuracy = static_cast<double>(m.tn + m.tp) / static_cast<double>(total);
  r.error_rate = 1.0 - r.accuracy;
  r.recall = {ratio(m.tn, m.tn + m.fp), ratio(m.tp, m.tp + m.fn)};
  r.precision = {ratio(m.tn, m.tn + m.fn), ratio(m.tp, m.tp + m.fp)};
  const double t = static_cast<double>(total);
  r.cell_percent = {100.0 * static_cast<double>(m.tn) / t, 100.0 * static_cast<double>(m.fp) / t,
                    100.0 * static_cast<double>(m.fn) / t, 100.0 * static_cast<double>(m.tp) / t};
  return r;
}

double percent_1dp(double ratio) { return std::round(ratio * 1000.0) / 10.0; }

std::string metrics_json(const MetricsReport& r)
{
  const nlohmann::json doc = {
      {"counts", {{"tn", r.counts.tn}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tp", r.counts.tp}}},
      {"accuracy", r.accuracy},
      {"error_rate", r.error_rate},
      {"recall", {optional_json(r.recall[0]), optional_json(r.recall[1])}},
      {"precision", {optional_json(r.precision[0]), optional_json(r.precision[1])}},
      {"cell_percent",
       {{"tn", r.cell_percent[0]}, {"fp", r.cell_percent[1]}, {"fn", r.cell_percent[2]}, {"tp", r.cell_percent[3]}}},
  };
  return doc.dump(2) + "\n";
}

std::string metrics_table(const MetricsReport& r, const std::string& title)
{
  const auto complement = [](const std::optional<double>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return 1.0 - *v;
  };
  const auto& c = r.counts;
  std::ostringstream os;
  os << title << "\n";
  os << std::left;
  os << std::setw(10) << "output" << std::setw(18) << "target 0" << std::setw(18) << "target 1" << "\n";
  os << std::setw(10) << "0" << std::setw(18) << cell(c.tn, r.cell_percent[0]) << std::setw(18)
     << cell(c.fn, r.cell_percent[2]) << pct(r.precision[0]) << " / " << pct(complement(r.precision[0])) << "\n";
  os << std::setw(10) << "1" << std::setw(18) << cell(c.fp, r.cell_percent[1]) << std::setw(18)
     << cell(c.tp, r.cell_percent[3]) << pct(r.precision[1]) << " / " << pct(complement(r.precision[1])) << "\n";
  os << std::setw(10) << "" << std::setw(18) << pct(r.recall[0]) + " / " + pct(complement(r.recall[0]))
     << std::setw(18) << pct(r.recall[1]) + " / " + pct(complement(r.recall[1])) << pct(r.accuracy) << " / "
     << pct(r.error_rate) << "\n";
  return os.str();
}

}  // namespace litterscan
