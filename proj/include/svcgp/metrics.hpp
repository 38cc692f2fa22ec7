#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <string>
#include <utility>

namespace svcgp {

// Mean of squared differences.
double mse(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted);

// Interval score at interval level `level` (e.g. 0.95):
//   (1/n) sum [ (U-L) + 2/(1-level) * (L-Y) 1{Y<L} + 2/(1-level) * (Y-U) 1{Y>U} ].
// Note the 2/(1-level) penalty uses the interval level itself; some texts
// write the same factor as 2/alpha with alpha = 1 - level.
double interval_score(const Eigen::VectorXd& observed,
                      const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper, double level);

// One scored split of one run; mse and rmse are both reported because
// published tables are ambiguous about which of the two they show.
struct MetricsReport {
  std::string label;
  std::string split;  // "train" or "test"
  std::string scale;  // "model" or "physical"
  double mse = 0.0;
  double rmse = 0.0;
  double interval_score = 0.0;
  double level = 0.95;
  long n_pairs = 0;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

MetricsReport score(const Eigen::VectorXd& observed,
                    const Eigen::VectorXd& predicted,
                    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                    double level);

// Wall-clock a thunk on the monotonic clock.
template <class F>
auto timed(F&& thunk) {
  const auto t0 = std::chrono::steady_clock::now();
  auto value = std::forward<F>(thunk)();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return std::pair<decltype(value), double>{std::move(value), dt.count()};
}

}  // namespace svcgp
