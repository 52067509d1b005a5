#include "litterscan/train.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "litterscan/error.hpp"
#include "litterscan/log.hpp"
#include "litterscan/rng.hpp"

namespace litterscan {

namespace {

constexpr double kGradientTolerance = 1e-10;

double dot(const Weights& a, const Weights& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

void require_finite(double value, const char* what, int iteration)
{
  if (!std::isfinite(value)) {
    throw Error(std::string("training diverged: non-finite ") + what + " at iteration " + std::to_string(iteration));
  }
}

}  // namespace

std::string to_string(StopReason reason)
{
  switch (reason) {
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::val_early_stop:
      return "val_early_stop";
    case StopReason::gradient_converged:
      return "gradient_converged";
  }
  return "unknown";
}

void validate(const TrainConfig& cfg)
{
  if (cfg.max_iters < 0) throw Error("max_iters must be nonnegative");
  if (cfg.val_check_every <= 0) throw Error("val_check_every must be positive");
  if (cfg.max_val_failures <= 0) throw Error("max_val_failures must be positive");
  if (cfg.cg_restart_every <= 0) throw Error("cg_restart_every must be positive");
  const auto& ls = cfg.line_search;
  if (!(ls.initial_step > 0.0)) throw Error("line search initial step must be positive");
  if (!(ls.shrink > 0.0 && ls.shrink < 1.0)) throw Error("line search shrink factor must lie in (0, 1)");
  if (!(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0))
    throw Error("sufficient-decrease constant must lie in (0, 1)");
  if (ls.max_backtracks <= 0) throw Error("max_backtracks must be positive");
}

std::pair<MlpModel, TrainReport> train(const MlpModel& initial, const SampleSet& train_set, const SampleSet& val_set,
                                       const TrainConfig& cfg)
{
  validate(cfg);
  if (train_set.size() == 0 || val_set.size() == 0) throw Error("training and validation sets must be nonempty");

  TrainReport report;
  Weights w = initial.weights;
  auto [f, g] = loss_and_gradient(w, train_set);
  require_finite(f, "training loss", 0);

  double best_val = loss(w, val_set);
  require_finite(best_val, "validation loss", 0);
  Weights best_w = w;
  double best_train = f;
  report.loss_history.push_back({0, f, best_val});

  Weights d;
  for (std::size_t k = 0; k < kParamCount; ++k) d[k] = -g[k];
  int since_restart = 0;
  double prev_step = cfg.line_search.initial_step;
  double prev_slope = 0.0;
  int failures = 0;
  int iter = 0;
  report.stop_reason = StopReason::max_iters;

  while (iter < cfg.max_iters) {
    const double gg = dot(g, g);
    if (std::sqrt(gg) < kGradientTolerance) {
      report.stop_reason = StopReason::gradient_converged;
      break;
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t k = 0; k < kParamCount; ++k) d[k] = -g[k];
      slope = -gg;
      since_restart = 0;
      ++report.restarts;
    }

    double step = since_restart == 0 ? cfg.line_search.initial_step : 2.0 * prev_step * prev_slope / slope;
    if (!(step > 0.0) || !std::isfinite(step)) step = cfg.line_search.initial_step;

    bool accepted = false;
    Weights trial;
    double f_trial = 0.0;
    for (int k = 0; k < cfg.line_search.max_backtracks; ++k) {
      for (std::size_t p = 0; p < kParamCount; ++p) trial[p] = w[p] + step * d[p];
      f_trial = loss(trial, train_set);
      require_finite(f_trial, "training loss", iter);
      if (f_trial <= f + cfg.line_search.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.line_search.shrink;
    }

    if (!accepted) {
      if (since_restart != 0) {
        // Retry the same iteration along steepest descent.
        for (std::size_t k = 0; k < kParamCount; ++k) d[k] = -g[k];
        since_restart = 0;
        ++report.restarts;
        continue;
      }
      log().debug("line search failed along steepest descent at iteration {}", iter);
      report.stop_reason = StopReason::gradient_converged;
      break;
    }

    ++iter;
    report.steps.push_back({iter, step, f, f_trial, slope});
    w = trial;
    auto [f_new, g_new] = loss_and_gradient(w, train_set);
    require_finite(f_new, "training loss", iter);

    double beta = 0.0;
    if (++since_restart >= cfg.cg_restart_every) {
      since_restart = 0;
      ++report.restarts;
    } else {
      double num = 0.0;
      for (std::size_t k = 0; k < kParamCount; ++k) num += g_new[k] * (g_new[k] - g[k]);
      beta = std::max(0.0, num / gg);
    }
    for (std::size_t k = 0; k < kParamCount; ++k) d[k] = -g_new[k] + beta * d[k];
    prev_step = step;
    prev_slope = slope;
    f = f_new;
    g = g_new;

    if (iter % cfg.val_check_every == 0) {
      const double v = loss(w, val_set);
      require_finite(v, "validation loss", iter);
      report.loss_history.push_back({iter, f, v});
      log().debug("iteration {}: train {:.6g} val {:.6g} step {:.3g}", iter, f, v, step);
      if (v < best_val) {
        best_val = v;
        best_w = w;
        best_train = f;
        report.best_iteration = iter;
        failures = 0;
      } else if (++failures >= cfg.max_val_failures) {
        report.stop_reason = StopReason::val_early_stop;
        break;
      }
    }
  }

  report.iterations_run = iter;
  report.final_train_loss = best_train;
  report.final_val_loss = best_val;

  MlpModel out = initial;
  out.weights = best_w;
  return {std::move(out), std::move(report)};
}

std::pair<MlpModel, TrainReport> fit(const SampleSet& train_set, const SampleSet& val_set, const Normalizer& normalizer,
                                     std::vector<std::string> band_order, const TrainConfig& cfg)
{
  return train(init_model(cfg.seed, normalizer, std::move(band_order)), train_set, val_set, cfg);
}

ConfusionMatrix evaluate(const MlpModel& model, const SampleSet& normalized, double threshold)
{
  std::vector<std::uint8_t> predicted(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    predicted[i] = forward(model, normalized.feature(i)) >= threshold ? 1 : 0;
  }
  return confusion(std::span<const std::uint8_t>(predicted), std::span<const std::uint8_t>(normalized.labels));
}

TrainingRun train_pipeline(const AlignedCube& cube, const LabelMask& mask, const SplitSpec& fractions,
                           std::uint64_t seed, TrainConfig cfg)
{
  SplitSpec spec = fractions;
  spec.seed = seed;
  const PreparedData data = prepare_training_data(cube, mask, spec, kParamCount);
  SplitMix64 seeds(seed);
  seeds.next();
  seeds.next();
  cfg.seed = seeds.next();

  log().info("samples: {} extracted ({} plastic), {} after balancing; split {}/{}/{}", data.report.total_samples,
               data.report.positives, data.report.balanced_samples, data.report.train, data.report.val,
               data.report.test);

  auto [model, report] = fit(data.parts.train, data.parts.val, data.normalizer, cube.band_order, cfg);
  log().info("training stopped after {} iterations ({}), val loss {:.6g}", report.iterations_run,
               to_string(report.stop_reason), report.final_val_loss);

  TrainingRun run{std::move(model), std::move(report), data.report, {}};
  run.test_confusion = evaluate(run.model, data.parts.test);
  return run;
}

std::string training_run_json(const TrainingRun& run)
{
  using nlohmann::json;
  const auto& r = run.report;
  json history = json::array();
  for (const auto& h : r.loss_history) history.push_back({h.iteration, h.train_loss, h.val_loss});
  const auto& d = run.dataset;
  json doc = {
      {"train",
       {{"iterations_run", r.iterations_run},
        {"best_iteration", r.best_iteration},
        {"final_train_loss", r.final_train_loss},
        {"final_val_loss", r.final_val_loss},
        {"stop_reason", to_string(r.stop_reason)},
        {"restarts", r.restarts},
        {"loss_history", history}}},
      {"dataset",
       {{"total_samples", d.total_samples},
        {"positives", d.positives},
        {"negatives", d.negatives},
        {"balanced_samples", d.balanced_samples},
        {"train", d.train},
        {"val", d.val},
        {"test", d.test},
        {"samples_per_weight", d.samples_per_weight}}},
      {"test", json::parse(metrics_json(metrics(run.test_confusion)))},
  };
  return doc.dump(2) + "\n";
}

}  // namespace litterscan
