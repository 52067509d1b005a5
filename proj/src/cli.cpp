#include "litterscan/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "litterscan/dataset.hpp"
#include "litterscan/error.hpp"
#include "litterscan/eval.hpp"
#include "litterscan/indexes.hpp"
#include "litterscan/log.hpp"
#include "litterscan/mlp.hpp"
#include "litterscan/raster_io.hpp"
#include "litterscan/resample.hpp"
#include "litterscan/synthetic.hpp"
#include "litterscan/train.hpp"

namespace litterscan::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> bands;
  std::string manifest;
  std::string cube;
  std::string mask;
  std::string truth;
  std::string model;
  std::string out;
  std::string report;
  std::string table;
  std::string method;
  std::optional<double> threshold;
  std::optional<double> ndvi_max;
  std::optional<double> fdi_min;
  std::uint64_t seed = 0;
  int max_iters = TrainConfig{}.max_iters;
  int val_failures = TrainConfig{}.max_val_failures;
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  std::size_t rows = 100;
  std::size_t cols = 100;
  double plastic_frac = 0.15;
};

void cmd_import(const Options& o)
{
  std::vector<Band> bands;
  std::optional<double> extent;
  for (const auto& item : o.bands) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("--band expects ID=FILE, got '" + item + "'");
    const BandSpec& spec = band_spec(item.substr(0, eq));
    Band band = import_pgm_band(item.substr(eq + 1), spec);
    if (!extent) extent = static_cast<double>(band.rows) * spec.native_gsd_m;
    bands.push_back(std::move(band));
  }
  const BandStack stack(std::move(bands), *extent);
  save_stack(stack, o.out);
  log().info("wrote {}-band stack to {}", stack.bands().size(), o.out);
}

void cmd_resample(const Options& o)
{
  const AlignedCube cube = align_stack(load_stack(o.manifest));
  write_cube(cube, o.out);
  log().info("wrote {}x{}x{} cube to {}", cube.rows, cube.cols, cube.n_bands(), o.out);
}

void cmd_index(const Options& o)
{
  const AlignedCube cube = read_cube(o.cube);
  if (o.method == "combined") {
    if (!o.ndvi_max || !o.fdi_min) throw Error("--method combined requires --ndvi-max and --fdi-min");
    if (o.mask.empty()) throw Error("--method combined requires --mask");
    const LabelMask mask = combined_index_mask(cube, *o.ndvi_max, *o.fdi_min);
    write_float_raster(fdi(cube), o.out);
    write_mask(mask, o.mask);
    return;
  }

  IndexMap map;
  if (o.method == "ndvi") {
    map = ndvi(cube);
  } else if (o.method == "fdi") {
    map = fdi(cube);
  } else {
    map = b8b9_index(cube);
  }
  if (!o.mask.empty() && !o.threshold) throw Error("--mask requires --threshold");
  std::optional<LabelMask> mask;
  if (!o.mask.empty()) mask = threshold_map(map, *o.threshold);
  write_float_raster(map, o.out);
  if (mask) write_mask(*mask, o.mask);
}

void cmd_train(const Options& o)
{
  const AlignedCube cube = read_cube(o.cube);
  const LabelMask truth = read_mask(o.mask);
  TrainConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.max_val_failures = o.val_failures;
  const SplitSpec fractions{o.train_frac, o.val_frac, o.test_frac, 0};
  const TrainingRun run = train_pipeline(cube, truth, fractions, o.seed, cfg);

  const std::string report_path = o.report.empty() ? o.out + ".report.json" : o.report;
  save_model(run.model, o.out);
  write_file_atomic(report_path, training_run_json(run));
  log().info("test error rate {:.4f}", metrics(run.test_confusion).error_rate);
}

void cmd_predict(const Options& o)
{
  const MlpModel model = load_model(o.model);
  const AlignedCube cube = read_cube(o.cube);
  const Prediction pred = predict_map(model, cube, o.threshold.value_or(0.5));
  write_float_raster(pred.output, o.out);
  if (!o.mask.empty()) write_mask(pred.mask, o.mask);
}

void cmd_eval(const Options& o)
{
  const MetricsReport report = metrics(confusion(read_mask(o.mask), read_mask(o.truth)));
  write_file_atomic(o.out, metrics_json(report));
  if (!o.table.empty()) write_file_atomic(o.table, metrics_table(report, "Confusion matrix"));
  log().info("accuracy {:.4f}", report.accuracy);
}

void cmd_make_synthetic(const Options& o)
{
  SyntheticConfig cfg;
  cfg.rows = o.rows;
  cfg.cols = o.cols;
  cfg.plastic_fraction = o.plastic_frac;
  cfg.seed = o.seed;
  const SyntheticScene scene = make_synthetic(cfg);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_cube(scene.cube, dir / "cube.f32");
  write_mask(scene.truth, dir / "truth.pgm");
  log().info("wrote synthetic scene to {}", dir.string());
}

}  // namespace

void configure_logging() { apply_log_level_from_env(); }

int run(const std::vector<std::string>& args)
{
  configure_logging();

  Options o;
  CLI::App app{"Plastic detection in 13-band multispectral imagery"};
  app.require_subcommand(1);

  auto* imp = app.add_subcommand("import", "Build a band-stack container from PGM bands");
  imp->add_option("--band", o.bands, "Band as ID=FILE.pgm (repeatable)")->required();
  imp->add_option("--out", o.out, "Output manifest path")->required();

  auto* res = app.add_subcommand("resample", "Align all bands onto the finest grid");
  res->add_option("--manifest", o.manifest)->required();
  res->add_option("--out", o.out, "Output cube path")->required();

  auto* idx = app.add_subcommand("index", "Compute a spectral index map");
  idx->add_option("--cube", o.cube)->required();
  idx->add_option("--method", o.method)->required()->check(CLI::IsMember({"ndvi", "fdi", "b8b9", "combined"}));
  idx->add_option("--out", o.out, "Output float raster")->required();
  idx->add_option("--mask", o.mask, "Optional output PGM mask");
  idx->add_option("--threshold", o.threshold);
  idx->add_option("--ndvi-max", o.ndvi_max);
  idx->add_option("--fdi-min", o.fdi_min);

  auto* trn = app.add_subcommand("train", "Train the per-pixel classifier");
  trn->add_option("--cube", o.cube)->required();
  trn->add_option("--mask", o.mask, "Ground-truth PGM mask")->required();
  trn->add_option("--out", o.out, "Output model JSON")->required();
  trn->add_option("--report", o.report, "Training report JSON (default <out>.report.json)");
  trn->add_option("--seed", o.seed);
  trn->add_option("--max-iters", o.max_iters)->check(CLI::NonNegativeNumber);
  trn->add_option("--val-failures", o.val_failures)->check(CLI::PositiveNumber);
  trn->add_option("--train-frac", o.train_frac)->check(CLI::Range(0.0, 1.0));
  trn->add_option("--val-frac", o.val_frac)->check(CLI::Range(0.0, 1.0));
  trn->add_option("--test-frac", o.test_frac)->check(CLI::Range(0.0, 1.0));

  auto* prd = app.add_subcommand("predict", "Apply a trained model to a cube");
  prd->add_option("--model", o.model)->required();
  prd->add_option("--cube", o.cube)->required();
  prd->add_option("--out", o.out, "Output map of network outputs")->required();
  prd->add_option("--mask", o.mask, "Optional output PGM mask");
  prd->add_option("--threshold", o.threshold, "Decision threshold (default 0.5)");

  auto* evl = app.add_subcommand("eval", "Compare a predicted mask with ground truth");
  evl->add_option("--mask", o.mask, "Predicted PGM mask")->required();
  evl->add_option("--truth", o.truth, "Ground-truth PGM mask")->required();
  evl->add_option("--out", o.out, "Metrics JSON")->required();
  evl->add_option("--table", o.table, "Optional text table");

  auto* syn = app.add_subcommand("make-synthetic", "Generate a seeded two-class test scene");
  syn->add_option("--out", o.out, "Output directory")->required();
  syn->add_option("--seed", o.seed);
  syn->add_option("--rows", o.rows)->check(CLI::PositiveNumber);
  syn->add_option("--cols", o.cols)->check(CLI::PositiveNumber);
  syn->add_option("--plastic-frac", o.plastic_frac)->check(CLI::Range(0.0, 1.0));

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("litterscan");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "litterscan: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*imp) cmd_import(o);
    if (*res) cmd_resample(o);
    if (*idx) cmd_index(o);
    if (*trn) cmd_train(o);
    if (*prd) cmd_predict(o);
    if (*evl) cmd_eval(o);
    if (*syn) cmd_make_synthetic(o);
  } catch (const std::exception& e) {
    std::cerr << "litterscan: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace litterscan::cli
