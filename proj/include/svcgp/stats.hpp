#pragma once

#include <Eigen/Dense>
#include <vector>

namespace svcgp {

double mean(const Eigen::VectorXd& v);

// Unbiased sample variance (n-1 denominator); n must be >= 2.
double sample_variance(const Eigen::VectorXd& v);

// Empirical quantile with linear interpolation between order statistics
// (the common "type 7" rule): h = p*(n-1), interpolate x[(floor h)]..x[h+1].
double quantile(std::vector<double> v, double p);
double quantile(const Eigen::VectorXd& v, double p);

// Standard normal quantile function.
double normal_quantile(double p);

// Streaming mean/variance accumulator.
class RunningMoments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  long n() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {  // unbiased; 0 until two samples seen
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace svcgp
