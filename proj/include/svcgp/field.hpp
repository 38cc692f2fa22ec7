#pragma once

#include <Eigen/Dense>
#include <vector>

namespace svcgp {

// A complete space-time field: one column per period, one row per location.
// Column t holds the field at period label periods[t]; labels are strictly
// increasing integers (period indices or year*12+month style encodings).
struct SpaceTimeField {
  Eigen::MatrixXd values;          // n x T
  std::vector<long long> periods;  // size T, strictly increasing
  Eigen::MatrixX2d points;         // n x 2 coordinates, row-aligned with values

  int n() const { return static_cast<int>(values.rows()); }
  int T() const { return static_cast<int>(values.cols()); }

  // Flattened copy in period-major order: entry t*n + k is (period t, point k).
  Eigen::VectorXd vec() const {
    return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  }
};

// First floor(T * fraction) periods vs. the rest.
struct TrainTestSplit {
  SpaceTimeField train;
  SpaceTimeField test;
};
TrainTestSplit split_train_test(const SpaceTimeField& field, double fraction);

// Column subset by position, keeping labels and points.
SpaceTimeField select_periods(const SpaceTimeField& field,
                              const std::vector<int>& cols);

}  // namespace svcgp
