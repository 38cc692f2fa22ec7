#include "svcgp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "svcgp/errors.hpp"

namespace svcgp {

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw DomainError("nelder_mead: empty parameter vector");

  NelderMeadResult res;
  int evals = 0;
  bool exhausted = false;
  // hard budget: once max_evals is reached no further f calls are made and
  // the current iteration finishes on +inf placeholders, which can never
  // displace a genuinely evaluated vertex from the reported optimum
  auto eval = [&](const Eigen::VectorXd& x) {
    if (evals >= opts.max_evals) {
      exhausted = true;
      return std::numeric_limits<double>::infinity();
    }
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i](i - 1) += opts.init_step;
  for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
  };

  bool converged = false;
  while (!exhausted) {
    sort_simplex();
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(fs[worst] - fs[best]) <=
        opts.tol * (1.0 + std::abs(fs[best]))) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);  // reflect
    const double fr = eval(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = eval(xe);
      if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
      else { xs[worst] = xr; fs[worst] = fr; }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      // contract (outside if the reflection helped at all, else inside)
      const Eigen::VectorXd xc =
          fr < fs[worst] ? centroid + 0.5 * (xr - centroid)
                         : centroid + 0.5 * (xs[worst] - centroid);
      const double fc = eval(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {  // shrink toward the best vertex
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = eval(xs[i]);
          if (exhausted) break;
        }
      }
    }
  }

  sort_simplex();
  res.x = xs[order[0]];
  res.fmin = fs[order[0]];
  res.evals = evals;
  res.converged = converged;
  return res;
}

}  // namespace svcgp
