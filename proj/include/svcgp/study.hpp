#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svcgp/likelihood.hpp"
#include "svcgp/model.hpp"

namespace svcgp {

std::uint64_t fnv1a64(const std::string& s);

// A scenario x model x replication sweep: simulate, fit, predict over every
// period (rows in a period score against the fit conditioned on the other
// training periods; testing periods are genuine forecasts), add the coarse
// field back, map to the physical scale, and score both splits.
struct StudyConfig {
  std::vector<std::string> presets;  // scenario names, run in this order
  std::vector<ModelKind> models;
  int replications = 0;  // 0: each preset's published count
  int periods = 0;       // 0: each preset's period count
  int workers = 1;
  std::uint64_t seed = 0;
  double level = 0.95;
  Backend backend = Backend::exact();
  std::string out_dir;

  // Stable text rendering of every field that affects the numbers; its hash
  // keys journal rows so finished cells are reused only under an identical
  // configuration.
  std::string canonical() const;
  std::uint64_t config_hash() const { return fnv1a64(canonical()); }
};

// One scored split of one (scenario, model, replication) cell.
struct StudyRow {
  std::string model, scenario, resolution;
  int replication = 0;
  std::string split;  // "train" or "test"
  double mse = 0.0, rmse = 0.0, is95 = 0.0;
  std::string scale = "physical";
  double fit_seconds = 0.0, predict_seconds = 0.0;
};

struct StudyOutcome {
  int cells_run = 0;
  int cells_reused = 0;
  std::vector<StudyRow> rows;
  std::string metrics_path, reps_path, timing_path, journal_path;
};

// Runs the sweep over a worker pool.  Per-cell seeds depend only on the
// master seed, the preset name, and the replication index, so all models see
// the same simulated data and reordering the preset list cannot change any
// number.  Appends finished cells to <out>/journal.csv and rewrites
// <out>/metrics_reps.csv (per replication), <out>/metrics.csv (averaged over
// replications, layout model,scenario,resolution,split,mse,rmse,is95,scale)
// and <out>/timing.csv (model,scenario,resolution,minutes) in a fixed order,
// byte-stable across reruns with the same configuration.
StudyOutcome run_study(const StudyConfig& cfg);

// Single-cell runner used by run_study and by direct callers.
std::vector<StudyRow> run_study_cell(const std::string& preset, ModelKind kind,
                                     int replication, const StudyConfig& cfg);

struct BenchRow {
  long n = 0;
  double taper_range = 0.0;
  double nnz_fraction = 1.0;  // retained entries / n^2 in the spatial block
  double seconds = 0.0;       // median time of one likelihood evaluation
  std::string backend;        // "exact" or "tapered"
};

struct BenchConfig {
  int fine_side = 50;
  std::vector<double> taper_ranges = {0.5, 1.0, 2.0};
  int trials = 5;
  std::uint64_t seed = 0;
  std::string out_dir;
};

// Times dense vs. tapered likelihood evaluations on one simulated field and
// writes <out>/bench.csv (n,backend,taper_range,nnz_fraction,median_seconds).
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

}  // namespace svcgp
