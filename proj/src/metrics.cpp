#include "svcgp/metrics.hpp"

#include <cmath>

#include "svcgp/errors.hpp"

namespace svcgp {

double mse(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted) {
  if (observed.size() == 0) throw DataError("mse: empty input");
  if (observed.size() != predicted.size())
    throw DataError("mse: length mismatch");
  return (observed - predicted).squaredNorm() /
         static_cast<double>(observed.size());
}

double interval_score(const Eigen::VectorXd& observed,
                      const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper, double level) {
  const long n = observed.size();
  if (n == 0) throw DataError("interval_score: empty input");
  if (lower.size() != n || upper.size() != n)
    throw DataError("interval_score: length mismatch");
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("interval_score: level must be in (0,1)");
  const double penalty = 2.0 / (1.0 - level);
  double total = 0.0;
  for (long i = 0; i < n; ++i) {
    if (lower(i) > upper(i))
      throw DomainError("interval_score: lower bound exceeds upper bound");
    total += upper(i) - lower(i);
    if (observed(i) < lower(i)) total += penalty * (lower(i) - observed(i));
    if (observed(i) > upper(i)) total += penalty * (observed(i) - upper(i));
  }
  return total / static_cast<double>(n);
}

MetricsReport score(const Eigen::VectorXd& observed,
                    const Eigen::VectorXd& predicted,
                    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                    double level) {
  MetricsReport r;
  r.mse = mse(observed, predicted);
  r.rmse = std::sqrt(r.mse);
  r.interval_score = interval_score(observed, lower, upper, level);
  r.level = level;
  r.n_pairs = observed.size();
  return r;
}

}  // namespace svcgp
