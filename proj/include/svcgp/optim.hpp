#pragma once

#include <Eigen/Dense>
#include <functional>

namespace svcgp {

// Derivative-free simplex minimization (Nelder-Mead).  Convergence when
// the spread of function values over the simplex drops below
// tol * (1 + |f_best|).
struct NelderMeadOptions {
  double tol = 1e-6;
  int max_evals = 2000;
  double init_step = 0.5;  // initial simplex edge length per coordinate
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fmin = 0.0;
  int evals = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts);

}  // namespace svcgp
