#include "svcgp/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "svcgp/errors.hpp"

namespace svcgp {

namespace {

std::string line_msg(int line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // prefer the shortest representation that still round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  CsvTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (lineno == 1) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw DataError(path + ": " +
                      line_msg(lineno, "expected " +
                                           std::to_string(table.header.size()) +
                                           " fields, got " +
                                           std::to_string(fields.size())));
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw DataError(path + ": missing header row");
  return table;
}

void write_csv_table(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw DataError("write failed for " + path);
}

long long parse_period(const std::string& s, int line) {
  if (is_integer(s)) return std::stoll(s);
  int year = 0, month = 0, day = 1;
  const int got = std::sscanf(s.c_str(), "%d-%d-%d", &year, &month, &day);
  if (got < 2 || month < 1 || month > 12 || day < 1 || day > 31)
    throw DataError(line_msg(line, "unparseable time '" + s + "'"));
  return static_cast<long long>(year) * 12 + (month - 1);
}

double parse_double(const std::string& s, int line) {
  if (s.empty()) throw DataError(line_msg(line, "empty numeric field"));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw DataError(line_msg(line, "unparseable number '" + s + "'"));
  return v;
}

void write_dataset_csv(const std::string& path, const TrainingData& data) {
  CsvTable table;
  table.header = {"time", "x", "y", "value"};
  for (int j = 1; j <= data.q(); ++j)
    table.header.push_back("covariate_" + std::to_string(j));
  const int n = data.n(), T = data.T();
  table.rows.reserve(static_cast<std::size_t>(n) * T);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < n; ++k) {
      std::vector<std::string> row;
      row.push_back(std::to_string(data.y.periods[static_cast<std::size_t>(t)]));
      row.push_back(format_double(data.y.points(k, 0)));
      row.push_back(format_double(data.y.points(k, 1)));
      row.push_back(format_double(data.y.values(k, t)));
      for (int j = 0; j < data.q(); ++j)
        row.push_back(format_double(data.x[static_cast<std::size_t>(j)](k, t)));
      table.rows.push_back(std::move(row));
    }
  write_csv_table(path, table);
}

IngestReport ingest_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  if (table.header.size() < 4 || table.header[0] != "time" ||
      table.header[1] != "x" || table.header[2] != "y" ||
      table.header[3] != "value")
    throw DataError(path + ": header must start with time,x,y,value");
  const int q = static_cast<int>(table.header.size()) - 4;
  for (int j = 0; j < q; ++j)
    if (table.header[static_cast<std::size_t>(4 + j)] !=
        "covariate_" + std::to_string(j + 1))
      throw DataError(path + ": covariate columns must be covariate_1..covariate_q");
  if (table.rows.empty()) throw DataError(path + ": no data rows");

  struct Row {
    long long period;
    double x, y;
    bool missing;
    double value;
    std::vector<double> cov;
    int line;
  };
  std::vector<Row> rows;
  rows.reserve(table.rows.size());
  std::map<std::tuple<long long, double, double>, int> seen;
  std::set<long long> periods;
  std::set<double> xs, ys;
  std::set<std::pair<double, double>> pts;
  int missing_count = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = static_cast<int>(r) + 2;
    Row row;
    row.line = line;
    row.period = parse_period(f[0], line);
    row.x = parse_double(f[1], line);
    row.y = parse_double(f[2], line);
    row.missing = f[3].empty();
    row.value = row.missing ? 0.0 : parse_double(f[3], line);
    if (row.missing) ++missing_count;
    for (int j = 0; j < q; ++j)
      row.cov.push_back(parse_double(f[static_cast<std::size_t>(4 + j)], line));
    const auto key = std::make_tuple(row.period, row.x, row.y);
    const auto ins = seen.emplace(key, line);
    if (!ins.second)
      throw DataError(path + ": " +
                      line_msg(line, "duplicate (time,x,y) key (first at line " +
                                         std::to_string(ins.first->second) + ")"));
    periods.insert(row.period);
    xs.insert(row.x);
    ys.insert(row.y);
    pts.insert({row.x, row.y});
    rows.push_back(std::move(row));
  }

  IngestReport rep;
  rep.q = q;
  const std::size_t nx = xs.size(), ny = ys.size();
  const bool lattice = pts.size() == nx * ny;
  if (!lattice) {
    for (const auto& row : rows) {
      StationRecord st;
      st.period = row.period;
      st.x = row.x;
      st.y = row.y;
      if (!row.missing) st.value = row.value;
      rep.stations.push_back(st);
    }
    return rep;
  }
  if (rows.size() != periods.size() * nx * ny)
    throw DataError(path + ": ragged lattice: expected " +
                    std::to_string(periods.size() * nx * ny) + " rows for " +
                    std::to_string(periods.size()) + " periods x " +
                    std::to_string(nx * ny) + " lattice points, got " +
                    std::to_string(rows.size()));
  if (missing_count > 0)
    throw DataError(path + ": " + std::to_string(missing_count) +
                    " missing training values on a complete lattice");

  rep.gridded = true;
  rep.nx = static_cast<int>(nx);
  rep.ny = static_cast<int>(ny);
  const int n = static_cast<int>(nx * ny);
  const int T = static_cast<int>(periods.size());
  std::map<double, int> xi, yi;
  int c = 0;
  for (double v : xs) xi[v] = c++;
  c = 0;
  for (double v : ys) yi[v] = c++;
  std::map<long long, int> ti;
  c = 0;
  for (long long p : periods) ti[p] = c++;

  rep.data.y.values.setZero(n, T);
  rep.data.y.points.resize(n, 2);
  rep.data.y.periods.assign(periods.begin(), periods.end());
  {
    int k = 0;
    for (double y : ys)
      for (double x : xs) {
        rep.data.y.points(k, 0) = x;
        rep.data.y.points(k, 1) = y;
        ++k;
      }
  }
  for (int j = 0; j < q; ++j)
    rep.data.x.push_back(Eigen::MatrixXd::Zero(n, T));
  for (const auto& row : rows) {
    const int k = yi[row.y] * static_cast<int>(nx) + xi[row.x];
    const int t = ti[row.period];
    rep.data.y.values(k, t) = row.value;
    for (int j = 0; j < q; ++j)
      rep.data.x[static_cast<std::size_t>(j)](k, t) =
          row.cov[static_cast<std::size_t>(j)];
  }
  return rep;
}

std::vector<StationRecord> read_stations_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  if (table.header.size() < 4 || table.header[0] != "time" ||
      table.header[1] != "x" || table.header[2] != "y" ||
      table.header[3] != "value")
    throw DataError(path + ": header must start with time,x,y,value");
  std::vector<StationRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = static_cast<int>(r) + 2;
    StationRecord st;
    st.period = parse_period(f[0], line);
    st.x = parse_double(f[1], line);
    st.y = parse_double(f[2], line);
    if (!f[3].empty()) st.value = parse_double(f[3], line);
    out.push_back(st);
  }
  if (out.empty()) throw DataError(path + ": no station rows");
  return out;
}

void write_grid_csv(const std::string& path, const Grid& grid) {
  CsvTable table;
  table.header = {"index", "x", "y"};
  for (int k = 0; k < grid.size(); ++k)
    table.rows.push_back({std::to_string(k), format_double(grid.points()(k, 0)),
                          format_double(grid.points()(k, 1))});
  write_csv_table(path, table);
}

void write_map_csv(const std::string& path, const GridPair& pair) {
  CsvTable table;
  table.header = {"fine_index", "coarse_index"};
  for (std::size_t k = 0; k < pair.fine_to_coarse.size(); ++k)
    table.rows.push_back(
        {std::to_string(k), std::to_string(pair.fine_to_coarse[k])});
  write_csv_table(path, table);
}

void write_predictions_csv(const std::string& path,
                           const PredictionResult& pred) {
  CsvTable table;
  table.header = {"time", "x", "y", "mean", "lower", "upper", "scale"};
  const char* scale =
      pred.scale == PredictionScale::model ? "model" : "physical";
  for (int i = 0; i < pred.m(); ++i)
    table.rows.push_back({std::to_string(pred.periods[static_cast<std::size_t>(i)]),
                          format_double(pred.points(i, 0)),
                          format_double(pred.points(i, 1)),
                          format_double(pred.mean(i)),
                          format_double(pred.lower(i)),
                          format_double(pred.upper(i)), scale});
  write_csv_table(path, table);
}

PredictionResult read_predictions_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  const std::vector<std::string> want = {"time", "x",     "y",     "mean",
                                         "lower", "upper", "scale"};
  if (table.header != want)
    throw DataError(path + ": header must be time,x,y,mean,lower,upper,scale");
  if (table.rows.empty()) throw DataError(path + ": no prediction rows");
  PredictionResult pred;
  const int m = static_cast<int>(table.rows.size());
  pred.points.resize(m, 2);
  pred.mean.resize(m);
  pred.lower.resize(m);
  pred.upper.resize(m);
  std::string scale0;
  for (int i = 0; i < m; ++i) {
    const auto& f = table.rows[static_cast<std::size_t>(i)];
    const int line = i + 2;
    pred.periods.push_back(parse_period(f[0], line));
    pred.points(i, 0) = parse_double(f[1], line);
    pred.points(i, 1) = parse_double(f[2], line);
    pred.mean(i) = parse_double(f[3], line);
    pred.lower(i) = parse_double(f[4], line);
    pred.upper(i) = parse_double(f[5], line);
    if (f[6] != "model" && f[6] != "physical")
      throw DataError(line_msg(line, "scale must be model or physical"));
    if (scale0.empty()) scale0 = f[6];
    if (f[6] != scale0)
      throw DataError(line_msg(line, "mixed prediction scales in one file"));
  }
  pred.scale =
      scale0 == "model" ? PredictionScale::model : PredictionScale::physical;
  return pred;
}

namespace {

const char* family_name(KernelFamily f) {
  return f == KernelFamily::matern ? "matern" : "exponential";
}

KernelFamily parse_family(const std::string& s) {
  if (s == "matern") return KernelFamily::matern;
  if (s == "exponential") return KernelFamily::exponential;
  throw DataError("unknown kernel family '" + s + "'");
}

}  // namespace

void write_fit_csv(const std::string& path, const FitResult& fit) {
  CsvTable table;
  table.header = {"key", "value"};
  auto put = [&](const std::string& k, const std::string& v) {
    table.rows.push_back({k, v});
  };
  auto putd = [&](const std::string& k, double v) { put(k, format_double(v)); };
  put("model", model_kind_name(fit.model.kind));
  put("q", std::to_string(fit.model.q));
  put("varying_slopes", fit.model.varying_slopes ? "1" : "0");
  put("temporal", fit.model.temporal.kind == TemporalKind::ar1 ? "ar1" : "iid");
  put("family0", family_name(fit.model.family0));
  putd("nu0", fit.model.nu0);
  put("family1", family_name(fit.model.family1));
  putd("nu1", fit.model.nu1);
  putd("beta0", fit.estimates.beta0);
  for (int j = 0; j < fit.model.q; ++j)
    putd("beta1_" + std::to_string(j + 1), fit.estimates.beta1(j));
  if (fit.model.has_spatial()) {
    putd("sd0", fit.estimates.theta0.sd);
    putd("range0", fit.estimates.theta0.range);
  }
  if (fit.estimates.theta1) {
    putd("sd1", fit.estimates.theta1->sd);
    putd("range1", fit.estimates.theta1->range);
  }
  putd("tau_sq", fit.estimates.tau_sq);
  if (fit.estimates.rho_ar) putd("rho_ar", *fit.estimates.rho_ar);
  putd("loglik", fit.loglik);
  put("evals", std::to_string(fit.evals));
  put("converged", fit.converged ? "1" : "0");
  putd("elapsed_seconds", fit.elapsed_seconds);
  put("method", fit.method);
  putd("jitter", fit.jitter);
  write_csv_table(path, table);
}

FitResult read_fit_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  if (table.header != std::vector<std::string>{"key", "value"})
    throw DataError(path + ": header must be key,value");
  std::map<std::string, std::string> kv;
  for (const auto& row : table.rows) {
    if (!kv.emplace(row[0], row[1]).second)
      throw DataError(path + ": duplicate key '" + row[0] + "'");
  }
  auto need = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw DataError(path + ": missing key '" + k + "'");
    return it->second;
  };
  auto needd = [&](const std::string& k) { return parse_double(need(k), 0); };
  auto haved = [&](const std::string& k) { return kv.count(k) > 0; };

  FitResult fit;
  fit.model = make_model_spec(parse_model_kind(need("model")),
                              std::stoi(need("q")));
  const bool slopes_vary = need("varying_slopes") == "1";
  const std::string temporal = need("temporal");
  if (temporal != "iid" && temporal != "ar1")
    throw DataError(path + ": temporal must be iid or ar1");
  if (fit.model.kind == ModelKind::generic) {
    // structure is free for the generic kind: take it from the file
    fit.model.varying_slopes = slopes_vary;
    fit.model.temporal.kind =
        temporal == "ar1" ? TemporalKind::ar1 : TemporalKind::iid;
  } else {
    if (slopes_vary != fit.model.varying_slopes)
      throw DataError(path + ": varying_slopes inconsistent with model kind");
    if ((temporal == "ar1") != (fit.model.temporal.kind == TemporalKind::ar1))
      throw DataError(path + ": temporal structure inconsistent with model kind");
  }
  fit.model.family0 = parse_family(need("family0"));
  fit.model.nu0 = needd("nu0");
  fit.model.family1 = parse_family(need("family1"));
  fit.model.nu1 = needd("nu1");

  fit.estimates = make_param_template(fit.model);
  fit.estimates.beta0 = needd("beta0");
  for (int j = 0; j < fit.model.q; ++j)
    fit.estimates.beta1(j) = needd("beta1_" + std::to_string(j + 1));
  if (fit.model.has_spatial()) {
    fit.estimates.theta0.sd = needd("sd0");
    fit.estimates.theta0.range = needd("range0");
    fit.estimates.theta0.family = fit.model.family0;
    fit.estimates.theta0.nu = fit.model.nu0;
  }
  if (fit.estimates.theta1) {
    fit.estimates.theta1->sd = needd("sd1");
    fit.estimates.theta1->range = needd("range1");
    fit.estimates.theta1->family = fit.model.family1;
    fit.estimates.theta1->nu = fit.model.nu1;
  }
  fit.estimates.tau_sq = needd("tau_sq");
  if (fit.estimates.rho_ar) {
    if (!haved("rho_ar")) throw DataError(path + ": missing key 'rho_ar'");
    fit.estimates.rho_ar = needd("rho_ar");
  }
  fit.loglik = needd("loglik");
  fit.evals = std::stoi(need("evals"));
  fit.converged = need("converged") == "1";
  fit.elapsed_seconds = needd("elapsed_seconds");
  fit.method = need("method");
  fit.jitter = needd("jitter");
  return fit;
}

}  // namespace svcgp
