#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "litterscan/dataset.hpp"
#include "litterscan/eval.hpp"
#include "litterscan/mlp.hpp"

namespace litterscan {

struct LineSearchConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
};

struct TrainConfig {
  int max_iters = 1000;
  int val_check_every = 1;
  int max_val_failures = 6;
  std::uint64_t seed = 0;  // weight initialization, used by fit()
  int cg_restart_every = static_cast<int>(kParamCount);
  LineSearchConfig line_search;
};

enum class StopReason { max_iters, val_early_stop, gradient_converged };

std::string to_string(StopReason reason);

struct LossRecord {
  int iteration = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

/// One accepted line-search step.
struct StepRecord {
  int iteration = 0;
  double step = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double slope = 0.0;  // g . d at the start of the step
};

struct TrainReport {
  int iterations_run = 0;
  int best_iteration = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<LossRecord> loss_history;
  std::vector<StepRecord> steps;
  int restarts = 0;
};

/// Polak-Ribiere+ nonlinear conjugate gradient on the training MSE with an
/// Armijo backtracking line search.
///
/// Directions restart to steepest descent every cg_restart_every iterations
/// and whenever the CG direction is not a descent direction. The first trial
/// step is initial_step after a restart and otherwise twice the previous
/// step rescaled by the ratio of directional derivatives. Validation loss is
/// checked every val_check_every iterations; training stops after
/// max_val_failures consecutive checks without strict improvement, at
/// max_iters, or when the gradient norm drops below 1e-10 (also used when no
/// step along steepest descent decreases the loss). The returned model holds
/// the weights with the best validation loss seen, including the initial
/// weights. Throws Error on a non-finite loss.
std::pair<MlpModel, TrainReport> train(const MlpModel& initial, const SampleSet& train_set, const SampleSet& val_set,
                                       const TrainConfig& cfg);

/// init_model(cfg.seed, ...) followed by train().
std::pair<MlpModel, TrainReport> fit(const SampleSet& train_set, const SampleSet& val_set, const Normalizer& normalizer,
                                     std::vector<std::string> band_order, const TrainConfig& cfg);

void validate(const TrainConfig& cfg);

/// Result of the full extract -> balance -> split -> normalize -> train run.
struct TrainingRun {
  MlpModel model;
  TrainReport report;
  DatasetReport dataset;
  ConfusionMatrix test_confusion;
};

/// All randomness derives from `seed`: the first two SplitMix64(seed)
/// outputs seed balancing and splitting, the third seeds weight
/// initialization (cfg.seed is overwritten).
TrainingRun train_pipeline(const AlignedCube& cube, const LabelMask& mask, const SplitSpec& fractions,
                           std::uint64_t seed, TrainConfig cfg);

/// Labels a normalized sample set with the model at the given threshold.
ConfusionMatrix evaluate(const MlpModel& model, const SampleSet& normalized, double threshold = 0.5);

std::string training_run_json(const TrainingRun& run);

}  // namespace litterscan
