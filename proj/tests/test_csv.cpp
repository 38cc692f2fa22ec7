#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "svcgp/csv.hpp"
#include "svcgp/errors.hpp"
#include "svcgp/grid.hpp"

using namespace svcgp;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("svcgp_test_" + name))
      .string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// returns the message of the DataError thrown by fn, failing if none is
template <class Fn>
std::string data_error_message(Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  FAIL("expected a DataError");
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// unlike std::stod this never throws on subnormals, it just returns them
double parse_back(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

TEST_CASE("doubles are printed in the shortest exact form") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-3.25) == "-3.25");

  const double hard[] = {1.0 / 3.0,
                         M_PI,
                         1e-300,
                         1.7976931348623157e308,
                         -2.5e-10,
                         123456789.123456789,
                         5e-324};
  for (double v : hard) CHECK(parse_back(format_double(v)) == v);

  std::mt19937_64 rng(606);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  for (int i = 0; i < 300; ++i) {
    const double v = normal(rng) * std::pow(10.0, mag(rng));
    CHECK(parse_back(format_double(v)) == v);
  }
}

TEST_CASE("raw tables round-trip and reject ragged rows") {
  const std::string path = tmp_path("table.csv");
  CsvTable t;
  t.header = {"a", "b", "c"};
  t.rows = {{"1", "2", "3"}, {"x", "", "z"}};
  write_csv_table(path, t);
  const CsvTable back = read_csv_table(path);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  // blank lines (either flavor) are skipped
  write_text(path, "a,b\n\n1,2\n\r\n3,4\n");
  const CsvTable sparse = read_csv_table(path);
  CHECK(sparse.rows.size() == 2);
  CHECK(sparse.rows[1] == std::vector<std::string>{"3", "4"});

  write_text(path, "a,b\n1\n");
  const std::string msg =
      data_error_message([&] { read_csv_table(path); });
  CHECK(contains(msg, "line 2"));
  CHECK(contains(msg, "expected 2 fields, got 1"));

  write_text(path, "");
  CHECK_THROWS_AS(read_csv_table(path), DataError);
  CHECK_THROWS_AS(read_csv_table(tmp_path("no_such_file.csv")), DataError);
}

TEST_CASE("period fields accept integers and ISO dates") {
  CHECK(parse_period("17", 1) == 17);
  CHECK(parse_period("-3", 1) == -3);
  CHECK(parse_period("2026-08", 1) == 2026LL * 12 + 7);
  CHECK(parse_period("2026-08-25", 1) == 2026LL * 12 + 7);
  CHECK(parse_period("1999-01-01", 1) == 1999LL * 12);

  const std::string msg =
      data_error_message([] { parse_period("x", 9); });
  CHECK(contains(msg, "line 9"));
  CHECK(contains(msg, "unparseable time 'x'"));
  CHECK_THROWS_AS(parse_period("1999-13", 1), DataError);
  CHECK_THROWS_AS(parse_period("12.5", 1), DataError);
  CHECK_THROWS_AS(parse_period("", 1), DataError);

  CHECK(parse_double("1.5e-3", 1) == 1.5e-3);
  CHECK_THROWS_AS(parse_double("", 4), DataError);
  CHECK_THROWS_AS(parse_double("abc", 4), DataError);
  CHECK_THROWS_AS(parse_double("1.5x", 4), DataError);
}

TEST_CASE("a complete lattice dataset survives the write/ingest round trip") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  const double xs[] = {0.0, 0.5, 1.25};
  const double ys[] = {-1.0, 2.0};
  TrainingData d;
  d.y.points.resize(6, 2);
  int k = 0;
  for (double y : ys)
    for (double x : xs) d.y.points.row(k++) << x, y;
  d.y.periods = {3, 7};
  d.y.values.resize(6, 2);
  for (int i = 0; i < 6; ++i)
    for (int t = 0; t < 2; ++t) d.y.values(i, t) = normal(rng);
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXd xj(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int t = 0; t < 2; ++t) xj(i, t) = normal(rng);
    d.x.push_back(std::move(xj));
  }

  const std::string path = tmp_path("dataset.csv");
  write_dataset_csv(path, d);
  const IngestReport rep = ingest_csv(path);
  REQUIRE(rep.gridded);
  CHECK(rep.nx == 3);
  CHECK(rep.ny == 2);
  CHECK(rep.q == 2);
  CHECK(rep.data.y.periods == d.y.periods);
  CHECK((rep.data.y.points - d.y.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rep.data.y.values - d.y.values).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < 2; ++j)
    CHECK((rep.data.x[j] - d.x[j]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dataset ingestion normalizes ISO months to a monthly index") {
  const std::string path = tmp_path("iso.csv");
  write_text(path,
             "time,x,y,value\n"
             "2001-01,0.5,0.5,1.5\n"
             "2001-02,0.5,0.5,2.5\n");
  const IngestReport rep = ingest_csv(path);
  REQUIRE(rep.gridded);
  CHECK(rep.nx == 1);
  CHECK(rep.ny == 1);
  CHECK(rep.data.y.periods ==
        std::vector<long long>{2001 * 12 + 0, 2001 * 12 + 1});
  CHECK(rep.data.y.values(0, 0) == 1.5);
  CHECK(rep.data.y.values(0, 1) == 2.5);
}

TEST_CASE("dataset ingestion rejects duplicate keys and ragged lattices") {
  const std::string path = tmp_path("bad.csv");
  write_text(path,
             "time,x,y,value\n"
             "1,0,0,1.0\n"
             "1,0,0,2.0\n");
  const std::string dup = data_error_message([&] { ingest_csv(path); });
  CHECK(contains(dup, "duplicate (time,x,y) key"));
  CHECK(contains(dup, "line 3"));
  CHECK(contains(dup, "first at line 2"));

  // complete 2x2 lattice in period 1, one row missing from period 2
  write_text(path,
             "time,x,y,value\n"
             "1,0,0,1\n1,1,0,2\n1,0,1,3\n1,1,1,4\n"
             "2,0,0,5\n2,1,0,6\n2,0,1,7\n");
  const std::string ragged = data_error_message([&] { ingest_csv(path); });
  CHECK(contains(ragged, "ragged lattice"));
  CHECK(contains(ragged, "expected 8 rows"));

  // complete lattice with an empty training value
  write_text(path,
             "time,x,y,value\n"
             "1,0,0,1\n1,1,0,\n1,0,1,3\n1,1,1,4\n");
  const std::string missing = data_error_message([&] { ingest_csv(path); });
  CHECK(contains(missing, "missing training values"));

  write_text(path, "time,x,y,price\n1,0,0,1\n");
  CHECK_THROWS_AS(ingest_csv(path), DataError);
  write_text(path, "time,x,y,value,humidity\n1,0,0,1,2\n");
  CHECK_THROWS_AS(ingest_csv(path), DataError);
  write_text(path, "time,x,y,value\n");
  CHECK_THROWS_AS(ingest_csv(path), DataError);
}

TEST_CASE("scattered points degrade to a station list") {
  const std::string path = tmp_path("stations_like.csv");
  write_text(path,
             "time,x,y,value\n"
             "1,0,0,1.5\n"
             "1,1,1,2.5\n"
             "1,0,1,\n");
  const IngestReport rep = ingest_csv(path);
  CHECK(!rep.gridded);
  REQUIRE(rep.stations.size() == 3);
  CHECK(rep.stations[0].value.has_value());
  CHECK(*rep.stations[0].value == 1.5);
  CHECK(!rep.stations[2].value.has_value());
  CHECK(rep.stations[1].x == 1.0);

  const auto st = read_stations_csv(path);
  REQUIRE(st.size() == 3);
  CHECK(st[0].period == 1);
  CHECK(*st[1].value == 2.5);
  CHECK(!st[2].value.has_value());

  write_text(path, "time,x,y,value\n");
  CHECK_THROWS_AS(read_stations_csv(path), DataError);
}

TEST_CASE("grid and assignment files list every node") {
  const GridPair pair = build_grids({{0.0, 1.0, 0.0, 1.0}, 4, 2});
  const std::string gpath = tmp_path("grid.csv");
  const std::string mpath = tmp_path("map.csv");
  write_grid_csv(gpath, pair.fine);
  write_map_csv(mpath, pair);

  const CsvTable g = read_csv_table(gpath);
  CHECK(g.header == std::vector<std::string>{"index", "x", "y"});
  REQUIRE(g.rows.size() == 16);
  CHECK(g.rows[0][0] == "0");
  CHECK(std::stod(g.rows[5][1]) == pair.fine.points()(5, 0));
  CHECK(std::stod(g.rows[5][2]) == pair.fine.points()(5, 1));

  const CsvTable m = read_csv_table(mpath);
  CHECK(m.header == std::vector<std::string>{"fine_index", "coarse_index"});
  REQUIRE(m.rows.size() == 16);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(std::stoi(m.rows[k][1]) == pair.fine_to_coarse[k]);
}

TEST_CASE("prediction files round-trip bitwise") {
  PredictionResult p;
  p.periods = {2, 2, 5};
  p.points.resize(3, 2);
  p.points << 0.1, 0.2, 1.0 / 3.0, 0.4, 0.5, M_PI;
  p.mean.resize(3);
  p.mean << 1.5, -2.25, 1e-7;
  p.lower = p.mean.array() - 0.75;
  p.upper = p.mean.array() + 0.75;
  p.scale = PredictionScale::physical;
  p.level = 0.9;

  const std::string path = tmp_path("pred.csv");
  write_predictions_csv(path, p);
  const PredictionResult back = read_predictions_csv(path);
  CHECK(back.periods == p.periods);
  CHECK((back.points - p.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.mean - p.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.lower - p.lower).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.upper - p.upper).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.scale == PredictionScale::physical);

  write_text(path,
             "time,x,y,mean,lower,upper,scale\n"
             "1,0,0,1,0,2,model\n"
             "1,1,0,1,0,2,physical\n");
  const std::string mixed =
      data_error_message([&] { read_predictions_csv(path); });
  CHECK(contains(mixed, "mixed prediction scales"));

  write_text(path,
             "time,x,y,mean,lower,upper,scale\n"
             "1,0,0,1,0,2,log\n");
  CHECK_THROWS_AS(read_predictions_csv(path), DataError);
  write_text(path, "time,x,y,mean,lower,upper,scale\n");
  CHECK_THROWS_AS(read_predictions_csv(path), DataError);
  write_text(path, "time,x,y,mean,lower,upper\n1,0,0,1,0,2\n");
  CHECK_THROWS_AS(read_predictions_csv(path), DataError);
}

TEST_CASE("fit files invert exactly for every model structure") {
  const std::string path = tmp_path("fit.csv");

  FitResult noise;
  noise.model = make_model_spec(ModelKind::m0, 0);
  noise.estimates = make_param_template(noise.model);
  noise.estimates.beta0 = 1.0 / 3.0;
  noise.estimates.tau_sq = 2.7e-5;
  noise.loglik = -123.456;
  noise.evals = 1;
  noise.converged = true;
  noise.elapsed_seconds = 0.25;
  noise.method = "ml-closed-form";
  noise.jitter = 0.0;
  write_fit_csv(path, noise);
  const FitResult noise_back = read_fit_csv(path);
  CHECK(noise_back.model.kind == ModelKind::m0);
  CHECK(noise_back.estimates.beta0 == noise.estimates.beta0);
  CHECK(noise_back.estimates.tau_sq == noise.estimates.tau_sq);
  CHECK(noise_back.loglik == noise.loglik);
  CHECK(noise_back.method == noise.method);
  CHECK(noise_back.converged);

  FitResult m3;
  m3.model = make_model_spec(ModelKind::m3, 2);
  m3.model.family0 = KernelFamily::matern;
  m3.model.nu0 = 1.5;
  m3.estimates = make_param_template(m3.model);
  m3.estimates.beta0 = -0.05;
  m3.estimates.beta1 << 0.125, M_PI;
  m3.estimates.theta0 = matern_kernel(0.37, 1.25, 1.5);
  m3.estimates.tau_sq = 0.0625;
  m3.estimates.rho_ar = 0.8125;
  m3.loglik = 9876.5;
  m3.evals = 431;
  m3.converged = false;
  m3.method = "ml-tapered";
  m3.jitter = 1e-8;
  write_fit_csv(path, m3);
  const FitResult m3_back = read_fit_csv(path);
  CHECK(m3_back.model.kind == ModelKind::m3);
  CHECK(m3_back.model.q == 2);
  CHECK(m3_back.model.temporal.kind == TemporalKind::ar1);
  CHECK(m3_back.model.nu0 == 1.5);
  CHECK(m3_back.estimates.beta1(0) == 0.125);
  CHECK(m3_back.estimates.beta1(1) == M_PI);
  CHECK(m3_back.estimates.theta0.sd == 1.25);
  CHECK(m3_back.estimates.theta0.range == 0.37);
  CHECK(m3_back.estimates.theta0.nu == 1.5);
  CHECK(*m3_back.estimates.rho_ar == 0.8125);
  CHECK(m3_back.evals == 431);
  CHECK(!m3_back.converged);
  CHECK(m3_back.method == "ml-tapered");
  CHECK(m3_back.jitter == 1e-8);

  // free-structure model: slope processes and temporal kind come from the file
  FitResult gen;
  gen.model = make_model_spec(ModelKind::generic, 1);
  gen.model.varying_slopes = true;
  gen.model.temporal.kind = TemporalKind::ar1;
  gen.model.family1 = KernelFamily::exponential;
  gen.model.nu1 = 0.5;
  gen.estimates = make_param_template(gen.model);
  gen.estimates.beta0 = 0.5;
  gen.estimates.beta1 << -1.5;
  gen.estimates.theta0 = exponential_kernel(0.2, 0.9);
  gen.estimates.theta1 = exponential_kernel(0.11, 0.33);
  gen.estimates.tau_sq = 0.75;
  gen.estimates.rho_ar = -0.25;
  gen.method = "ml-exact";
  write_fit_csv(path, gen);
  const FitResult gen_back = read_fit_csv(path);
  CHECK(gen_back.model.kind == ModelKind::generic);
  CHECK(gen_back.model.varying_slopes);
  CHECK(gen_back.model.temporal.kind == TemporalKind::ar1);
  REQUIRE(gen_back.estimates.theta1.has_value());
  CHECK(gen_back.estimates.theta1->sd == 0.33);
  CHECK(gen_back.estimates.theta1->range == 0.11);
  REQUIRE(gen_back.estimates.rho_ar.has_value());
  CHECK(*gen_back.estimates.rho_ar == -0.25);
}

TEST_CASE("fit files reject inconsistent or incomplete records") {
  const std::string path = tmp_path("fit_bad.csv");
  write_text(path,
             "key,value\nmodel,M1\nq,0\nvarying_slopes,1\ntemporal,iid\n");
  const std::string inconsistent =
      data_error_message([&] { read_fit_csv(path); });
  CHECK(contains(inconsistent, "varying_slopes inconsistent"));

  write_text(path,
             "key,value\nmodel,M1\nq,0\nvarying_slopes,0\ntemporal,banana\n");
  CHECK_THROWS_AS(read_fit_csv(path), DataError);

  write_text(path, "key,value\nmodel,M1\nmodel,M2\n");
  const std::string dup = data_error_message([&] { read_fit_csv(path); });
  CHECK(contains(dup, "duplicate key 'model'"));

  write_text(path, "key,value\nmodel,M0\nq,0\nvarying_slopes,0\ntemporal,iid\n");
  const std::string missing = data_error_message([&] { read_fit_csv(path); });
  CHECK(contains(missing, "missing key"));

  write_text(path, "k,v\nmodel,M0\n");
  CHECK_THROWS_AS(read_fit_csv(path), DataError);
}
