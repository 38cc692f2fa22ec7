#include <cmath>

#include "doctest.h"
#include "svcgp/optim.hpp"

using namespace svcgp;

TEST_CASE("simplex search solves a separable quadratic") {
  auto f = [](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      const double d = x(i) - (i + 1);
      s += (i + 1) * d * d;
    }
    return s;
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);
  NelderMeadOptions opts;
  opts.tol = 1e-12;
  opts.max_evals = 20000;
  const auto res = nelder_mead(f, x0, opts);
  CHECK(res.converged);
  for (int i = 0; i < 4; ++i)
    CHECK(res.x(i) == doctest::Approx(i + 1).epsilon(1e-4));
  CHECK(res.fmin < 1e-8);
  CHECK(res.evals <= opts.max_evals);
}

TEST_CASE("simplex search descends the rosenbrock valley") {
  auto f = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  NelderMeadOptions opts;
  opts.tol = 1e-14;
  opts.max_evals = 50000;
  const auto res = nelder_mead(f, x0, opts);
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.fmin < 1e-6);
}

TEST_CASE("evaluation budget is a hard cap") {
  int calls = 0;
  auto f = [&calls](const Eigen::VectorXd& x) {
    ++calls;
    return x.squaredNorm();
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 10.0);
  NelderMeadOptions opts;
  opts.tol = 1e-16;  // unreachable: run must stop on the budget
  opts.max_evals = 40;
  const auto res = nelder_mead(f, x0, opts);
  CHECK(calls <= 40);
  CHECK(res.evals == calls);
  CHECK_FALSE(res.converged);
  // still made progress from the start
  CHECK(res.fmin < f(x0) - 1e-12);
  CHECK(res.fmin == doctest::Approx(f(res.x)).epsilon(1e-12));
}

TEST_CASE("runs are deterministic for identical inputs") {
  auto f = [](const Eigen::VectorXd& x) {
    return std::pow(x(0) - 0.3, 4) + std::abs(x(1) + 2.0);
  };
  Eigen::VectorXd x0(2);
  x0 << 5.0, 5.0;
  NelderMeadOptions opts;
  opts.max_evals = 3000;
  const auto a = nelder_mead(f, x0, opts);
  const auto b = nelder_mead(f, x0, opts);
  CHECK(a.fmin == b.fmin);
  CHECK(a.evals == b.evals);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a flat objective converges immediately") {
  auto f = [](const Eigen::VectorXd&) { return 3.5; };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
  const auto res = nelder_mead(f, x0, NelderMeadOptions{});
  CHECK(res.converged);
  CHECK(res.fmin == 3.5);
}
