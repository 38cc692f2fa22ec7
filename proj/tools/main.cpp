#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svcgp/csv.hpp"
#include "svcgp/errors.hpp"
#include "svcgp/fit.hpp"
#include "svcgp/mcmc.hpp"
#include "svcgp/metrics.hpp"
#include "svcgp/predict.hpp"
#include "svcgp/priors.hpp"
#include "svcgp/rng.hpp"
#include "svcgp/scenario.hpp"
#include "svcgp/simulate.hpp"
#include "svcgp/study.hpp"
#include "svcgp/version.hpp"

namespace {

using namespace svcgp;

// Removes every registered artifact unless the command commits, so a failed
// run leaves no partial outputs behind (journals excepted: they hold only
// complete rows and drive resumption).
class OutputGuard {
 public:
  void add(const std::string& path) { paths_.push_back(path); }
  void commit() { committed_ = true; }
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& canonical, std::uint64_t seed,
                    double wall_seconds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "version: " << kVersion << "\n";
  out << "command: " << command << "\n";
  out << "config: " << canonical << "\n";
  out << "config_hash: " << hash_hex(fnv1a64(canonical)) << "\n";
  out << "seed: " << seed << "\n";
  out << "wall_seconds: " << format_double(wall_seconds) << "\n";
}

std::map<std::string, double> parse_fixed(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--fix expects name=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_double(item.substr(eq + 1), 0);
  }
  return out;
}

Backend make_backend(const std::string& name, double taper_range) {
  if (name == "exact") return Backend::exact();
  if (name == "tapered") {
    if (!(taper_range > 0.0))
      throw ConfigError("tapered backend requires --taper-range > 0");
    return Backend::tapered(taper_range);
  }
  throw ConfigError("unknown backend '" + name + "' (exact | tapered)");
}

struct SimulateArgs {
  std::string preset, out;
  std::uint64_t seed = 0;
  int periods = 0;
  int replication = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  std::filesystem::create_directories(a.out);
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig sc = scenario_catalog(a.preset);
  if (a.periods > 0) sc.T = a.periods;
  const GridPair pair = build_grids(sc.grid);
  const std::uint64_t data_seed =
      derive_seed(a.seed ^ fnv1a64(sc.name), Stream::replication,
                  static_cast<std::uint64_t>(a.replication));
  const auto x_coarse =
      simulate_covariates(pair.coarse.size(), sc.T, sc.q, data_seed);
  const RegionalSim sim = simulate_regional(pair, sc.global, sc.regional,
                                            x_coarse, sc.T, data_seed);

  OutputGuard guard;
  auto path = [&](const char* name) {
    const std::string p = a.out + "/" + name;
    guard.add(p);
    return p;
  };
  write_grid_csv(path("fine_grid.csv"), pair.fine);
  write_grid_csv(path("coarse_grid.csv"), pair.coarse);
  write_map_csv(path("map.csv"), pair);
  write_dataset_csv(path("coarse.csv"), TrainingData{sim.c_coarse, x_coarse});
  write_dataset_csv(path("fine.csv"), TrainingData{sim.c_fine, {}});
  write_dataset_csv(path("response.csv"), TrainingData{sim.y, sim.x_fine});

  std::ostringstream canon;
  canon << "simulate;preset=" << a.preset << ";seed=" << a.seed
        << ";periods=" << a.periods << ";replication=" << a.replication;
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  write_manifest(path("manifest.txt"), "simulate", canon.str(), a.seed,
                 dt.count());
  guard.commit();
  std::cout << "simulate: wrote " << a.out << " (fine " << pair.fine.side()
            << "x" << pair.fine.side() << ", coarse " << pair.coarse.side()
            << "x" << pair.coarse.side() << ", T=" << sc.T << ")\n";
  return 0;
}

struct FitArgs {
  std::string data, out, model = "M1", method = "ml", backend = "exact";
  double taper_range = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> fixed;
  int draws = 20000, burn_in = 5000;
  double level = 0.95;
  double prior_sd_u = 0.32, prior_sd_p = 0.01, prior_range_median = 700.0;
  double prior_ar1_u = 0.0, prior_ar1_a = 0.9;
  int prior_ar1_base = 1;
};

int cmd_fit(const FitArgs& a) {
  std::filesystem::create_directories(a.out);
  const auto t0 = std::chrono::steady_clock::now();
  const IngestReport ingest = ingest_csv(a.data);
  if (!ingest.gridded)
    throw DataError("fit requires a complete gridded dataset; " + a.data +
                    " is a station list");
  const ModelSpec model =
      make_model_spec(parse_model_kind(a.model), ingest.q);
  const Backend backend = make_backend(a.backend, a.taper_range);
  const auto fixed = parse_fixed(a.fixed);

  OutputGuard guard;
  std::ostringstream canon;
  canon << "fit;data=" << a.data << ";model=" << a.model
        << ";method=" << a.method << ";backend=" << a.backend
        << ";taper=" << format_double(a.taper_range) << ";seed=" << a.seed;
  for (const auto& [k, v] : fixed) canon << ";fix:" << k << "=" << format_double(v);

  if (a.method == "ml") {
    FitOptions fo;
    fo.backend = backend;
    fo.seed = a.seed;
    fo.fixed = fixed;
    const FitResult fit = fit_ml(model, ingest.data, fo);
    const std::string fit_path = a.out + "/fit.csv";
    guard.add(fit_path);
    write_fit_csv(fit_path, fit);
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    guard.add(a.out + "/manifest.txt");
    write_manifest(a.out + "/manifest.txt", "fit", canon.str(), a.seed,
                   dt.count());
    guard.commit();
    std::cout << "fit: loglik=" << format_double(fit.loglik)
              << " converged=" << (fit.converged ? "yes" : "no")
              << " evals=" << fit.evals << " -> " << fit_path << "\n";
    return 0;
  }
  if (a.method != "mcmc")
    throw ConfigError("unknown method '" + a.method + "' (ml | mcmc)");

  PriorSpec prior;
  prior.sd0 = prior.sd1 = prior.nugget = {a.prior_sd_u, a.prior_sd_p};
  prior.range0 = prior.range1 = {a.prior_range_median};
  prior.ar1 = {a.prior_ar1_base, a.prior_ar1_u, a.prior_ar1_a};
  McmcOptions mo;
  mo.n_draws = a.draws;
  mo.burn_in = a.burn_in;
  mo.backend = backend;
  mo.fixed = fixed;
  mo.seed = a.seed;
  const PosteriorDraws draws = mcmc_fit(model, ingest.data, prior, mo);
  const auto summary = posterior_summary(draws, a.level);

  CsvTable table;
  table.header = {"parameter", "mean", "lower", "upper", "ess"};
  for (std::size_t j = 0; j < summary.size(); ++j)
    table.rows.push_back({summary[j].name, format_double(summary[j].mean),
                          format_double(summary[j].lower),
                          format_double(summary[j].upper),
                          format_double(draws.ess(static_cast<long>(j)))});
  const std::string post_path = a.out + "/posterior.csv";
  guard.add(post_path);
  write_csv_table(post_path, table);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  canon << ";draws=" << a.draws << ";burn_in=" << a.burn_in;
  guard.add(a.out + "/manifest.txt");
  write_manifest(a.out + "/manifest.txt", "fit", canon.str(), a.seed,
                 dt.count());
  guard.commit();
  std::cout << "fit: mcmc acceptance="
            << format_double(draws.acceptance_rate) << " -> " << post_path
            << "\n";
  return 0;
}

struct PredictArgs {
  std::string data, fit, out, targets;
  std::vector<long long> periods;
  double level = 0.95;
  bool exclude_own_period = false;
  bool physical = false;
};

int cmd_predict(const PredictArgs& a) {
  std::filesystem::create_directories(a.out);
  const auto t0 = std::chrono::steady_clock::now();
  const IngestReport ingest = ingest_csv(a.data);
  if (!ingest.gridded)
    throw DataError("predict requires the gridded training dataset");
  const FitResult fit = read_fit_csv(a.fit);
  if (fit.model.q != ingest.q)
    throw DataError("fit and dataset disagree on covariate count");

  PredictionTargets targets;
  if (!a.targets.empty()) {
    const CsvTable t = read_csv_table(a.targets);
    if (t.header.size() < 3 || t.header[0] != "time" || t.header[1] != "x" ||
        t.header[2] != "y")
      throw DataError(a.targets + ": header must start with time,x,y");
    const int q = static_cast<int>(t.header.size()) - 3;
    if (q != ingest.q)
      throw DataError(a.targets + ": expected " + std::to_string(ingest.q) +
                      " covariate columns");
    const int m = static_cast<int>(t.rows.size());
    targets.points.resize(m, 2);
    targets.covariates.resize(m, q);
    for (int i = 0; i < m; ++i) {
      const auto& f = t.rows[static_cast<std::size_t>(i)];
      const int line = i + 2;
      targets.periods.push_back(parse_period(f[0], line));
      targets.points(i, 0) = parse_double(f[1], line);
      targets.points(i, 1) = parse_double(f[2], line);
      for (int j = 0; j < q; ++j)
        targets.covariates(i, j) =
            parse_double(f[static_cast<std::size_t>(3 + j)], line);
    }
  } else if (!a.periods.empty()) {
    const auto& y = ingest.data.y;
    const int n = y.n();
    targets.points.resize(static_cast<long>(n) * a.periods.size(), 2);
    targets.covariates.resize(static_cast<long>(n) * a.periods.size(),
                              ingest.q);
    for (std::size_t pi = 0; pi < a.periods.size(); ++pi) {
      const long long period = a.periods[pi];
      const auto it =
          std::find(y.periods.begin(), y.periods.end(), period);
      if (ingest.q > 0 && it == y.periods.end())
        throw DataError("period " + std::to_string(period) +
                        " has no covariates in the training data; use "
                        "--targets to supply them");
      const int t = it == y.periods.end()
                        ? -1
                        : static_cast<int>(it - y.periods.begin());
      for (int k = 0; k < n; ++k) {
        const long row = static_cast<long>(pi) * n + k;
        targets.points.row(row) = y.points.row(k);
        targets.periods.push_back(period);
        for (int j = 0; j < ingest.q; ++j)
          targets.covariates(row, j) =
              ingest.data.x[static_cast<std::size_t>(j)](k, t);
      }
    }
  } else {
    throw ConfigError("predict needs --targets or --periods");
  }

  PredictOptions po{a.level, a.exclude_own_period};
  PredictionResult pred = predict_response(fit, ingest.data, targets, po);
  if (a.physical) pred = back_transform(pred);

  OutputGuard guard;
  const std::string pred_path = a.out + "/predictions.csv";
  guard.add(pred_path);
  write_predictions_csv(pred_path, pred);
  std::ostringstream canon;
  canon << "predict;data=" << a.data << ";fit=" << a.fit
        << ";targets=" << a.targets << ";level=" << format_double(a.level)
        << ";exclude_own=" << a.exclude_own_period
        << ";physical=" << a.physical;
  for (long long p : a.periods) canon << ";period=" << p;
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  guard.add(a.out + "/manifest.txt");
  write_manifest(a.out + "/manifest.txt", "predict", canon.str(), 0,
                 dt.count());
  guard.commit();
  std::cout << "predict: " << pred.m() << " rows -> " << pred_path << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string pred, truth, out, label = "evaluate";
  double level = 0.95;
};

int cmd_evaluate(const EvaluateArgs& a) {
  std::filesystem::create_directories(a.out);
  const auto t0 = std::chrono::steady_clock::now();
  const PredictionResult pred = read_predictions_csv(a.pred);
  const std::vector<StationRecord> stations = read_stations_csv(a.truth);
  const StationPairs pairs = evaluate_at_stations(pred, stations);
  if (pairs.n() == 0)
    throw DataError("no stations with observations to score");
  const MetricsReport m = score(pairs.observed, pairs.predicted, pairs.lower,
                                pairs.upper, a.level);

  OutputGuard guard;
  CsvTable table;
  table.header = {"label",   "scale",          "n_pairs",
                  "dropped_missing", "outside_extent", "mse",
                  "rmse",    "is95",           "level"};
  table.rows.push_back(
      {a.label,
       pred.scale == PredictionScale::model ? "model" : "physical",
       std::to_string(m.n_pairs), std::to_string(pairs.dropped_missing),
       std::to_string(pairs.outside_extent), format_double(m.mse),
       format_double(m.rmse), format_double(m.interval_score),
       format_double(a.level)});
  const std::string metrics_path = a.out + "/metrics.csv";
  guard.add(metrics_path);
  write_csv_table(metrics_path, table);
  std::ostringstream canon;
  canon << "evaluate;pred=" << a.pred << ";truth=" << a.truth
        << ";level=" << format_double(a.level);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  guard.add(a.out + "/manifest.txt");
  write_manifest(a.out + "/manifest.txt", "evaluate", canon.str(), 0,
                 dt.count());
  guard.commit();
  std::cout << "evaluate: n=" << m.n_pairs << " mse=" << format_double(m.mse)
            << " rmse=" << format_double(m.rmse)
            << " is95=" << format_double(m.interval_score) << " -> "
            << metrics_path << "\n";
  return 0;
}

struct StudyArgs {
  std::vector<std::string> presets;
  std::vector<std::string> models = {"M1"};
  std::string out, backend = "exact";
  double taper_range = 0.0;
  int replications = 0, periods = 0, workers = 1;
  std::uint64_t seed = 0;
  double level = 0.95;
};

int cmd_study(const StudyArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.presets = a.presets;
  for (const auto& name : a.models)
    cfg.models.push_back(parse_model_kind(name));
  cfg.replications = a.replications;
  cfg.periods = a.periods;
  cfg.workers = a.workers;
  cfg.seed = a.seed;
  cfg.level = a.level;
  cfg.backend = make_backend(a.backend, a.taper_range);
  cfg.out_dir = a.out;
  const StudyOutcome res = run_study(cfg);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  write_manifest(a.out + "/manifest.txt", "study", cfg.canonical(), a.seed,
                 dt.count());
  std::cout << "study: ran " << res.cells_run << " cells, reused "
            << res.cells_reused << " -> " << res.metrics_path << "\n";
  return 0;
}

struct BenchArgs {
  std::string out;
  std::uint64_t seed = 0;
  int fine_side = 50, trials = 5;
  std::vector<double> taper_ranges = {0.5, 1.0, 2.0};
};

int cmd_bench(const BenchArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.fine_side = a.fine_side;
  cfg.taper_ranges = a.taper_ranges;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.out_dir = a.out;
  const auto rows = run_bench(cfg);
  std::ostringstream canon;
  canon << "bench;fine_side=" << a.fine_side << ";trials=" << a.trials
        << ";seed=" << a.seed;
  for (double r : a.taper_ranges) canon << ";taper=" << format_double(r);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  write_manifest(a.out + "/manifest.txt", "bench", canon.str(), a.seed,
                 dt.count());
  for (const auto& r : rows)
    std::cout << "bench: n=" << r.n << " " << r.backend
              << " taper=" << format_double(r.taper_range)
              << " nnz=" << format_double(r.nnz_fraction)
              << " seconds=" << format_double(r.seconds) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal varying-coefficient downscaling emulator"};
  app.set_config("--config", "", "Plain-text key=value configuration file");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sub_sim = app.add_subcommand("simulate", "Draw one benchmark dataset");
  sub_sim->add_option("--preset", sim.preset, "Scenario preset name")
      ->required();
  sub_sim->add_option("--seed", sim.seed, "Master RNG seed")->required();
  sub_sim->add_option("--out", sim.out, "Output directory")->required();
  sub_sim->add_option("--periods", sim.periods, "Override period count");
  sub_sim->add_option("--replication", sim.replication, "Replication index");

  FitArgs fit;
  auto* sub_fit = app.add_subcommand("fit", "Estimate model parameters");
  sub_fit->add_option("--data", fit.data, "Training dataset CSV")->required();
  sub_fit->add_option("--out", fit.out, "Output directory")->required();
  sub_fit->add_option("--seed", fit.seed, "Master RNG seed")->required();
  sub_fit->add_option("--model", fit.model, "M0 | M1 | M2 | M3 | generic");
  sub_fit->add_option("--method", fit.method, "ml | mcmc");
  sub_fit->add_option("--backend", fit.backend, "exact | tapered");
  sub_fit->add_option("--taper-range", fit.taper_range,
                      "Taper support radius (tapered backend)");
  sub_fit->add_option("--fix", fit.fixed,
                      "Pin a parameter, e.g. --fix rho_ar=0.8");
  sub_fit->add_option("--draws", fit.draws, "Posterior draws (mcmc)");
  sub_fit->add_option("--burn-in", fit.burn_in, "Burn-in iterations (mcmc)");
  sub_fit->add_option("--level", fit.level, "Summary interval level (mcmc)");
  sub_fit->add_option("--prior-sd-u", fit.prior_sd_u,
                      "Sd prior tail point: P(sd > u) = p");
  sub_fit->add_option("--prior-sd-p", fit.prior_sd_p,
                      "Sd prior tail mass at u");
  sub_fit->add_option("--prior-range-median", fit.prior_range_median,
                      "Median of the range prior");
  sub_fit->add_option("--prior-ar1-u", fit.prior_ar1_u,
                      "AR(1) prior tail point");
  sub_fit->add_option("--prior-ar1-a", fit.prior_ar1_a,
                      "AR(1) prior tail mass");
  sub_fit->add_option("--prior-ar1-base", fit.prior_ar1_base,
                      "AR(1) prior base model: 1 or 0");

  PredictArgs pre;
  auto* sub_pre = app.add_subcommand("predict", "Predict the response");
  sub_pre->add_option("--data", pre.data, "Training dataset CSV")->required();
  sub_pre->add_option("--fit", pre.fit, "Fit CSV from the fit command")
      ->required();
  sub_pre->add_option("--out", pre.out, "Output directory")->required();
  sub_pre->add_option("--targets", pre.targets,
                      "Targets CSV (time,x,y[,covariate_*])");
  sub_pre->add_option("--periods", pre.periods,
                      "Predict at the training points for these periods")
      ->delimiter(',');
  sub_pre->add_option("--level", pre.level, "Interval level");
  sub_pre->add_flag("--exclude-own-period", pre.exclude_own_period,
                    "Condition each row on the other periods only");
  sub_pre->add_flag("--physical", pre.physical,
                    "exp-map predictions to the physical scale");

  EvaluateArgs eva;
  auto* sub_eva = app.add_subcommand("evaluate", "Score predictions");
  sub_eva->add_option("--pred", eva.pred, "Predictions CSV")->required();
  sub_eva->add_option("--truth", eva.truth, "Observations CSV")->required();
  sub_eva->add_option("--out", eva.out, "Output directory")->required();
  sub_eva->add_option("--level", eva.level, "Interval level");
  sub_eva->add_option("--label", eva.label, "Row label");

  StudyArgs stu;
  auto* sub_stu =
      app.add_subcommand("study", "Scenario x model x replication sweep");
  sub_stu->add_option("--preset", stu.presets, "Scenario presets")
      ->required()
      ->delimiter(',');
  sub_stu->add_option("--model", stu.models, "Models to fit")->delimiter(',');
  sub_stu->add_option("--out", stu.out, "Output directory")->required();
  sub_stu->add_option("--seed", stu.seed, "Master RNG seed")->required();
  sub_stu->add_option("--replications", stu.replications,
                      "Replications per scenario (0: preset count)");
  sub_stu->add_option("--periods", stu.periods,
                      "Override period count (0: preset count)");
  sub_stu->add_option("--workers", stu.workers, "Worker threads");
  sub_stu->add_option("--level", stu.level, "Interval level");
  sub_stu->add_option("--backend", stu.backend, "exact | tapered");
  sub_stu->add_option("--taper-range", stu.taper_range,
                      "Taper support radius (tapered backend)");

  BenchArgs ben;
  auto* sub_ben =
      app.add_subcommand("bench", "Time dense vs. tapered likelihoods");
  sub_ben->add_option("--out", ben.out, "Output directory")->required();
  sub_ben->add_option("--seed", ben.seed, "Master RNG seed")->required();
  sub_ben->add_option("--fine-side", ben.fine_side, "Grid side length");
  sub_ben->add_option("--taper-range", ben.taper_ranges, "Taper radii")
      ->delimiter(',');
  sub_ben->add_option("--trials", ben.trials, "Trials per timing median");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) std::cerr << "error: " << e.what() << "\n";
    return app.exit(e);
  }

  try {
    if (sub_sim->parsed()) return cmd_simulate(sim);
    if (sub_fit->parsed()) return cmd_fit(fit);
    if (sub_pre->parsed()) return cmd_predict(pre);
    if (sub_eva->parsed()) return cmd_evaluate(eva);
    if (sub_stu->parsed()) return cmd_study(stu);
    if (sub_ben->parsed()) return cmd_bench(ben);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command given\n";
  return 1;
}
