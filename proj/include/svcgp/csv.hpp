#pragma once

#include <string>
#include <vector>

#include "svcgp/fit.hpp"
#include "svcgp/grid.hpp"
#include "svcgp/model.hpp"
#include "svcgp/predict.hpp"

namespace svcgp {

// Shortest text form that round-trips a double exactly.
std::string format_double(double v);

// Raw comma-separated table; every row must have as many fields as the
// header. No quoting: all payloads here are numbers or bare words.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // rows[i] aligns with line i+2
};
CsvTable read_csv_table(const std::string& path);
void write_csv_table(const std::string& path, const CsvTable& table);

// Period field: an integer index, or an ISO date (YYYY-MM or YYYY-MM-DD)
// mapped to the monthly index year*12 + month-1. `line` feeds error text.
long long parse_period(const std::string& s, int line);
double parse_double(const std::string& s, int line);

// Dataset files: header time,x,y,value[,covariate_1..covariate_q], one row
// per (period, location).
void write_dataset_csv(const std::string& path, const TrainingData& data);

// What came back from a dataset file: a complete regular lattice becomes a
// gridded field (+ covariates); anything else degrades to a station list
// usable only for evaluation against predictions.
struct IngestReport {
  bool gridded = false;
  int nx = 0, ny = 0;  // inferred lattice dimensions when gridded
  int q = 0;
  TrainingData data;
  std::vector<StationRecord> stations;
};
IngestReport ingest_csv(const std::string& path);
std::vector<StationRecord> read_stations_csv(const std::string& path);

// Lattice description files: grid nodes (index,x,y) and the fine-to-coarse
// assignment (fine_index,coarse_index).
void write_grid_csv(const std::string& path, const Grid& grid);
void write_map_csv(const std::string& path, const GridPair& pair);

// Prediction files: header time,x,y,mean,lower,upper,scale.
void write_predictions_csv(const std::string& path,
                           const PredictionResult& pred);
PredictionResult read_predictions_csv(const std::string& path);

// Fit files: two-column key,value records covering the model structure, the
// estimates, and the optimizer diagnostics; read_fit_csv inverts exactly.
void write_fit_csv(const std::string& path, const FitResult& fit);
FitResult read_fit_csv(const std::string& path);

}  // namespace svcgp
