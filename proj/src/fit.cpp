#include "svcgp/fit.hpp"

#include <chrono>
#include <cmath>

#include "svcgp/errors.hpp"
#include "svcgp/rng.hpp"

namespace svcgp {

namespace {

double ols_residual_variance(const TrainingData& data) {
  const Eigen::MatrixXd f = data.design_matrix();
  const Eigen::VectorXd y = data.y.vec();
  const Eigen::VectorXd delta =
      (f.transpose() * f).ldlt().solve(f.transpose() * y);
  const Eigen::VectorXd r = y - f * delta;
  return r.squaredNorm() / r.size();
}

double point_spread(const Eigen::MatrixX2d& pts) {
  const Eigen::Vector2d lo = pts.colwise().minCoeff();
  const Eigen::Vector2d hi = pts.colwise().maxCoeff();
  const double d = (hi - lo).norm();
  return d > 0.0 ? d : 1.0;
}

}  // namespace

ParamVector default_start(const ModelSpec& model, const TrainingData& data) {
  ParamVector p = make_param_template(model);
  const double s2 = std::max(ols_residual_variance(data), 1e-300);
  // split the marginal variance: most into the nugget so that noise-only
  // data starts near its optimum, the rest into the spatial process
  p.tau_sq = 0.7 * s2;
  if (model.has_spatial()) {
    p.theta0.sd = std::sqrt(0.3 * s2);
    p.theta0.range = point_spread(data.y.points) / 5.0;
  }
  if (model.varying_slopes && p.theta1) {
    double mx2 = 0.0;
    for (int j = 0; j < model.q; ++j) mx2 += data.covariate_vec(j).squaredNorm();
    mx2 = std::max(mx2 / (model.q * data.nobs()), 1e-12);
    p.theta1->sd = std::sqrt(0.3 * s2 / mx2 / model.q);
    p.theta1->range = point_spread(data.y.points) / 5.0;
  }
  if (model.temporal.kind == TemporalKind::ar1) p.rho_ar = 0.3;
  return p;
}

FitResult fit_ml(const ModelSpec& model, const TrainingData& data,
                 const FitOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  FitResult res;
  res.model = model;
  res.method = opts.backend.kind == Backend::Kind::exact ? "ml-exact"
                                                         : "ml-tapered";

  if (model.kind == ModelKind::m0) {
    // closed form: intercept = sample mean, nugget = mean squared residual
    const Eigen::VectorXd y = data.y.vec();
    ParamVector p = make_param_template(model);
    p.beta0 = y.mean();
    auto it = opts.fixed.find("tau_sq");
    if (it != opts.fixed.end()) p.tau_sq = it->second;
    else p.tau_sq = std::max((y.array() - p.beta0).square().mean(), 1e-300);
    res.estimates = p;
    res.loglik = loglik_exact(model, p, data);
    res.converged = true;
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
  }

  const ParamLayout layout(model, /*include_betas=*/false, opts.fixed);
  if (layout.dim() == 0)
    throw ConfigError("fit_ml: no free parameters left to estimate");
  const ParamVector start = opts.init ? *opts.init : default_start(model, data);
  const Eigen::VectorXd t_start = layout.pack(start);

  auto objective = [&](const Eigen::VectorXd& t) {
    try {
      const ParamVector p = layout.unpack(t, start);
      return -loglik_profiled(model, p, data, opts.backend).loglik;
    } catch (const std::runtime_error&) {
      return 1e300;  // invalid or non-factorizable point; steer away
    }
  };

  Rng rng = make_rng(opts.seed, Stream::misc);
  std::normal_distribution<double> jig(0.0, 0.7);
  bool have_best = false;
  NelderMeadResult best;
  int total_evals = 0;
  const int restarts = std::max(opts.restarts, 1);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x0 = t_start;
    if (r > 0)
      for (int i = 0; i < x0.size(); ++i) x0(i) += jig(rng);
    NelderMeadResult nm = nelder_mead(objective, x0, opts.nm);
    total_evals += nm.evals;
    if (!have_best || nm.fmin < best.fmin) {
      best = nm;
      have_best = true;
    }
  }

  ParamVector p = layout.unpack(best.x, start);
  const ProfiledLoglik pl = loglik_profiled(model, p, data, opts.backend);
  p.beta0 = pl.beta0;
  p.beta1 = pl.beta1;
  res.estimates = p;
  res.loglik = pl.loglik;
  res.evals = total_evals;
  res.converged = best.converged;
  res.jitter = pl.jitter;
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace svcgp
