#include "svcgp/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "svcgp/csv.hpp"
#include "svcgp/errors.hpp"
#include "svcgp/fit.hpp"
#include "svcgp/metrics.hpp"
#include "svcgp/predict.hpp"
#include "svcgp/rng.hpp"
#include "svcgp/scenario.hpp"
#include "svcgp/simulate.hpp"
#include "svcgp/stats.hpp"

namespace svcgp {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string StudyConfig::canonical() const {
  std::ostringstream os;
  os << "presets=";
  for (std::size_t i = 0; i < presets.size(); ++i)
    os << (i ? "," : "") << presets[i];
  os << ";models=";
  for (std::size_t i = 0; i < models.size(); ++i)
    os << (i ? "," : "") << model_kind_name(models[i]);
  os << ";replications=" << replications << ";periods=" << periods
     << ";seed=" << seed << ";level=" << format_double(level) << ";backend=";
  if (backend.kind == Backend::Kind::exact) os << "exact";
  else os << "tapered:" << format_double(backend.taper_range);
  return os.str();
}

namespace {

ScenarioConfig scenario_for(const StudyConfig& cfg, const std::string& preset) {
  ScenarioConfig sc = scenario_catalog(preset);
  if (cfg.periods > 0) sc.T = cfg.periods;
  if (cfg.replications > 0) sc.replications = cfg.replications;
  return sc;
}

PredictionTargets targets_for(const SpaceTimeField& y,
                              const std::vector<Eigen::MatrixXd>& x,
                              const std::vector<int>& cols) {
  const int n = y.n();
  const int P = static_cast<int>(cols.size());
  const int q = static_cast<int>(x.size());
  PredictionTargets tg;
  tg.points.resize(static_cast<long>(n) * P, 2);
  tg.covariates.resize(static_cast<long>(n) * P, q);
  tg.periods.reserve(static_cast<std::size_t>(n) * P);
  for (int ci = 0; ci < P; ++ci) {
    const int t = cols[static_cast<std::size_t>(ci)];
    for (int k = 0; k < n; ++k) {
      const long row = static_cast<long>(ci) * n + k;
      tg.points.row(row) = y.points.row(k);
      tg.periods.push_back(y.periods[static_cast<std::size_t>(t)]);
      for (int j = 0; j < q; ++j)
        tg.covariates(row, j) = x[static_cast<std::size_t>(j)](k, t);
    }
  }
  return tg;
}

Eigen::VectorXd truth_for(const Eigen::MatrixXd& values,
                          const std::vector<int>& cols) {
  const long n = values.rows();
  Eigen::VectorXd out(n * static_cast<long>(cols.size()));
  for (std::size_t ci = 0; ci < cols.size(); ++ci)
    out.segment(static_cast<long>(ci) * n, n) = values.col(cols[ci]);
  return out;
}

Eigen::VectorXd offset_for(const SpaceTimeField& c_coarse,
                           const std::vector<int>& fine_to_coarse,
                           const std::vector<int>& cols) {
  const long n = static_cast<long>(fine_to_coarse.size());
  Eigen::VectorXd out(n * static_cast<long>(cols.size()));
  for (std::size_t ci = 0; ci < cols.size(); ++ci)
    for (long k = 0; k < n; ++k)
      out(static_cast<long>(ci) * n + k) =
          c_coarse.values(fine_to_coarse[static_cast<std::size_t>(k)],
                          cols[ci]);
  return out;
}

}  // namespace

std::vector<StudyRow> run_study_cell(const std::string& preset, ModelKind kind,
                                     int replication, const StudyConfig& cfg) {
  const ScenarioConfig sc = scenario_for(cfg, preset);
  const GridPair pair = build_grids(sc.grid);
  const std::uint64_t data_seed = derive_seed(
      cfg.seed ^ fnv1a64(sc.name), Stream::replication,
      static_cast<std::uint64_t>(replication));

  const auto x_coarse =
      simulate_covariates(pair.coarse.size(), sc.T, sc.q, data_seed);
  const RegionalSim sim = simulate_regional(pair, sc.global, sc.regional,
                                            x_coarse, sc.T, data_seed);

  const TrainTestSplit split = split_train_test(sim.y, sc.train_fraction);
  const int T_train = split.train.T();
  TrainingData train;
  train.y = split.train;
  for (const auto& xj : sim.x_fine)
    train.x.push_back(xj.leftCols(T_train));

  ModelSpec model = make_model_spec(kind, sc.q);
  FitOptions fo;
  fo.backend = cfg.backend;
  fo.seed = data_seed;
  for (const auto& [key, value] : sc.fixed_fit) {
    if (key == "rho_ar" && model.temporal.kind != TemporalKind::ar1) continue;
    fo.fixed[key] = value;
  }
  auto [fit, fit_seconds] = timed([&] { return fit_ml(model, train, fo); });

  std::vector<int> train_cols(static_cast<std::size_t>(T_train));
  for (int t = 0; t < T_train; ++t) train_cols[static_cast<std::size_t>(t)] = t;
  std::vector<int> test_cols;
  for (int t = T_train; t < sc.T; ++t) test_cols.push_back(t);

  const PredictionTargets tg_train = targets_for(sim.y, sim.x_fine, train_cols);
  const PredictionTargets tg_test = targets_for(sim.y, sim.x_fine, test_cols);
  auto [preds, predict_seconds] = timed([&] {
    // training rows score the fit against the other periods only; testing
    // rows are plain forecasts
    PredictOptions po_train{cfg.level, /*exclude_same_period=*/true};
    PredictOptions po_test{cfg.level, /*exclude_same_period=*/false};
    return std::pair{predict_response(fit, train, tg_train, po_train),
                     predict_response(fit, train, tg_test, po_test)};
  });

  std::vector<StudyRow> rows;
  for (int part = 0; part < 2; ++part) {
    const auto& cols = part == 0 ? train_cols : test_cols;
    const auto& pred = part == 0 ? preds.first : preds.second;
    const PredictionResult shifted =
        add_offset(pred, offset_for(sim.c_coarse, pair.fine_to_coarse, cols));
    const PredictionResult phys = back_transform(shifted);
    const Eigen::VectorXd observed =
        truth_for(sim.c_fine.values, cols).array().exp();
    const MetricsReport m =
        score(observed, phys.mean, phys.lower, phys.upper, cfg.level);
    StudyRow row;
    row.model = model_kind_name(kind);
    row.scenario = sc.scenario_label;
    row.resolution = sc.resolution_label;
    row.replication = replication;
    row.split = part == 0 ? "train" : "test";
    row.mse = m.mse;
    row.rmse = m.rmse;
    row.is95 = m.interval_score;
    row.scale = "physical";
    row.fit_seconds = fit_seconds;
    row.predict_seconds = predict_seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

const std::vector<std::string> kJournalHeader = {
    "config_hash", "preset",     "model",      "replication", "split",
    "scenario",    "resolution", "mse",        "rmse",        "is95",
    "scale",       "fit_seconds", "predict_seconds"};

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string journal_line(const std::string& hash, const std::string& preset,
                         int replication, const StudyRow& r) {
  std::ostringstream os;
  os << hash << ',' << preset << ',' << r.model << ',' << replication << ','
     << r.split << ',' << r.scenario << ',' << r.resolution << ','
     << format_double(r.mse) << ',' << format_double(r.rmse) << ','
     << format_double(r.is95) << ',' << r.scale << ','
     << format_double(r.fit_seconds) << ',' << format_double(r.predict_seconds);
  return os.str();
}

}  // namespace

StudyOutcome run_study(const StudyConfig& cfg) {
  if (cfg.presets.empty()) throw ConfigError("study: no presets given");
  if (cfg.models.empty()) throw ConfigError("study: no models given");
  if (cfg.workers < 1) throw ConfigError("study: workers must be >= 1");
  if (cfg.out_dir.empty()) throw ConfigError("study: output directory required");
  std::filesystem::create_directories(cfg.out_dir);

  const std::string hash = hash_hex(cfg.config_hash());
  StudyOutcome out;
  out.journal_path = cfg.out_dir + "/journal.csv";
  out.metrics_path = cfg.out_dir + "/metrics.csv";
  out.reps_path = cfg.out_dir + "/metrics_reps.csv";
  out.timing_path = cfg.out_dir + "/timing.csv";

  // previously finished cells under this exact configuration
  using CellKey = std::tuple<std::string, std::string, int>;
  std::map<CellKey, std::vector<StudyRow>> done;
  if (std::filesystem::exists(out.journal_path)) {
    const CsvTable journal = read_csv_table(out.journal_path);
    if (journal.header != kJournalHeader)
      throw DataError(out.journal_path + ": unexpected journal layout");
    for (const auto& f : journal.rows) {
      if (f[0] != hash) continue;
      StudyRow r;
      r.model = f[2];
      r.replication = std::stoi(f[3]);
      r.split = f[4];
      r.scenario = f[5];
      r.resolution = f[6];
      r.mse = parse_double(f[7], 0);
      r.rmse = parse_double(f[8], 0);
      r.is95 = parse_double(f[9], 0);
      r.scale = f[10];
      r.fit_seconds = parse_double(f[11], 0);
      r.predict_seconds = parse_double(f[12], 0);
      done[{f[1], r.model, r.replication}].push_back(std::move(r));
    }
  }

  struct Cell {
    std::size_t slot;
    std::string preset;
    ModelKind kind;
    int replication;
  };
  std::vector<Cell> pending;
  std::vector<std::vector<StudyRow>> slots;
  for (const auto& preset : cfg.presets) {
    const ScenarioConfig sc = scenario_for(cfg, preset);
    for (const ModelKind kind : cfg.models)
      for (int rep = 0; rep < sc.replications; ++rep) {
        const CellKey key{preset, model_kind_name(kind), rep};
        const auto it = done.find(key);
        if (it != done.end() && it->second.size() == 2) {
          slots.push_back(it->second);
          ++out.cells_reused;
        } else {
          pending.push_back(Cell{slots.size(), preset, kind, rep});
          slots.emplace_back();
        }
      }
  }

  std::ofstream journal(out.journal_path, std::ios::app);
  if (!journal) throw DataError("cannot write " + out.journal_path);
  if (std::filesystem::file_size(out.journal_path) == 0) {
    for (std::size_t i = 0; i < kJournalHeader.size(); ++i)
      journal << (i ? "," : "") << kJournalHeader[i];
    journal << "\n";
  }

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      const Cell& cell = pending[i];
      try {
        auto rows =
            run_study_cell(cell.preset, cell.kind, cell.replication, cfg);
        std::lock_guard<std::mutex> lock(io_mutex);
        for (const auto& r : rows)
          journal << journal_line(hash, cell.preset, cell.replication, r)
                  << "\n";
        journal.flush();
        slots[cell.slot] = std::move(rows);
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(pending.size());  // stop handing out work
        return;
      }
    }
  };
  {
    std::vector<std::thread> threads;
    const int nw = std::min<std::size_t>(cfg.workers, std::max<std::size_t>(
                                                          pending.size(), 1));
    for (int w = 0; w < nw; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  out.cells_run = static_cast<int>(pending.size());

  for (const auto& rows : slots)
    for (const auto& r : rows) out.rows.push_back(r);

  // per-replication rows, fixed order
  CsvTable reps;
  reps.header = {"model", "scenario", "resolution", "replication",
                 "split", "mse",      "rmse",       "is95",
                 "scale"};
  for (const auto& r : out.rows)
    reps.rows.push_back({r.model, r.scenario, r.resolution,
                         std::to_string(r.replication), r.split,
                         format_double(r.mse), format_double(r.rmse),
                         format_double(r.is95), r.scale});
  write_csv_table(out.reps_path, reps);

  // replication averages in (preset, model, split) order
  CsvTable metrics;
  metrics.header = {"model", "scenario", "resolution", "split",
                    "mse",   "rmse",     "is95",       "scale"};
  CsvTable timing;
  timing.header = {"model", "scenario", "resolution", "minutes"};
  std::size_t base = 0;
  for (const auto& preset : cfg.presets) {
    const ScenarioConfig sc = scenario_for(cfg, preset);
    for (const ModelKind kind : cfg.models) {
      const int R = sc.replications;
      double acc[2][3] = {{0, 0, 0}, {0, 0, 0}};
      double seconds = 0.0;
      for (int rep = 0; rep < R; ++rep) {
        const auto& rows = slots[base + static_cast<std::size_t>(rep)];
        for (const auto& r : rows) {
          const int part = r.split == "train" ? 0 : 1;
          acc[part][0] += r.mse;
          acc[part][1] += r.rmse;
          acc[part][2] += r.is95;
        }
        seconds += rows.front().fit_seconds + rows.front().predict_seconds;
      }
      base += static_cast<std::size_t>(R);
      for (int part = 0; part < 2; ++part)
        metrics.rows.push_back(
            {model_kind_name(kind), sc.scenario_label, sc.resolution_label,
             part == 0 ? "train" : "test", format_double(acc[part][0] / R),
             format_double(acc[part][1] / R), format_double(acc[part][2] / R),
             "physical"});
      timing.rows.push_back({model_kind_name(kind), sc.scenario_label,
                             sc.resolution_label,
                             format_double(seconds / R / 60.0)});
    }
  }
  write_csv_table(out.metrics_path, metrics);
  write_csv_table(out.timing_path, timing);
  return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.fine_side < 2) throw ConfigError("bench: fine_side must be >= 2");
  if (cfg.trials < 1) throw ConfigError("bench: trials must be >= 1");
  const Domain extent{0.0, 20.0, 0.0, 20.0};
  const Grid grid(extent, cfg.fine_side);
  const long n = grid.size();

  // timing does not depend on the response values, only on the structure
  TrainingData data;
  data.y.points = grid.points();
  data.y.periods = {1};
  data.y.values.resize(n, 1);
  Rng rng = make_rng(cfg.seed, Stream::noise);
  std::normal_distribution<double> normal;
  for (long k = 0; k < n; ++k) data.y.values(k, 0) = normal(rng);

  const ModelSpec model = make_model_spec(ModelKind::m1, 0);
  ParamVector p = make_param_template(model);
  p.beta0 = 0.0;
  p.theta0.range = 2.0;
  p.theta0.sd = 1.0;
  p.tau_sq = 0.1;

  auto median_time = [&](auto&& thunk) {
    std::vector<double> times;
    for (int trial = 0; trial < cfg.trials; ++trial)
      times.push_back(timed(thunk).second);
    return quantile(times, 0.5);
  };

  std::vector<BenchRow> rows;
  BenchRow exact_row;
  exact_row.n = n;
  exact_row.backend = "exact";
  exact_row.seconds = median_time([&] { return loglik_exact(model, p, data); });
  rows.push_back(exact_row);
  for (const double rho_star : cfg.taper_ranges) {
    BenchRow r;
    r.n = n;
    r.backend = "tapered";
    r.taper_range = rho_star;
    r.nnz_fraction =
        static_cast<double>(
            cov_tapered(data.y.points, p.theta0, {rho_star}).nonZeros()) /
        (static_cast<double>(n) * static_cast<double>(n));
    r.seconds = median_time(
        [&] { return loglik_tapered(model, p, {rho_star}, data); });
    rows.push_back(r);
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    CsvTable table;
    table.header = {"n", "backend", "taper_range", "nnz_fraction",
                    "median_seconds"};
    for (const auto& r : rows)
      table.rows.push_back({std::to_string(r.n), r.backend,
                            format_double(r.taper_range),
                            format_double(r.nnz_fraction),
                            format_double(r.seconds)});
    write_csv_table(cfg.out_dir + "/bench.csv", table);
  }
  return rows;
}

}  // namespace svcgp
