#include "svcgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/distributions/normal.hpp>

#include "svcgp/errors.hpp"

namespace svcgp {

double mean(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw DomainError("mean: empty vector");
  return v.mean();
}

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) throw DomainError("sample_variance: need n >= 2");
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw DomainError("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw DomainError("quantile: p outside [0,1]");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double quantile(const Eigen::VectorXd& v, double p) {
  return quantile(std::vector<double>(v.data(), v.data() + v.size()), p);
}

double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) throw DomainError("normal_quantile: p outside (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

}  // namespace svcgp
