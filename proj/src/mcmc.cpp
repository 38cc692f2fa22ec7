#include "svcgp/mcmc.hpp"

#include <cmath>
#include <limits>

#include "svcgp/errors.hpp"
#include "svcgp/rng.hpp"
#include "svcgp/stats.hpp"

namespace svcgp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ParamVector PosteriorDraws::param_at(int i) const {
  const ParamLayout layout(model, /*include_betas=*/true, {});
  // draws store natural values for the free names; rebuild via the template
  ParamVector p = tmpl;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const std::string& nm = names[j];
    const double v = draws(i, static_cast<int>(j));
    if (nm == "beta0") p.beta0 = v;
    else if (nm.rfind("beta1_", 0) == 0)
      p.beta1(std::stoi(nm.substr(6)) - 1) = v;
    else if (nm == "sd0") p.theta0.sd = v;
    else if (nm == "range0") p.theta0.range = v;
    else if (nm == "sd1" && p.theta1) p.theta1->sd = v;
    else if (nm == "range1" && p.theta1) p.theta1->range = v;
    else if (nm == "tau_sq") p.tau_sq = v;
    else if (nm == "rho_ar") p.rho_ar = v;
  }
  return p;
}

PosteriorDraws mcmc_fit(const ModelSpec& model, const TrainingData& data,
                        const PriorSpec& prior, const McmcOptions& opts) {
  if (opts.n_draws < 1 || opts.burn_in < 0)
    throw ConfigError("mcmc_fit: invalid chain lengths");
  if (!(opts.initial_step > 0.0))
    throw ConfigError("mcmc_fit: initial_step must be positive");
  const ParamLayout layout(model, /*include_betas=*/true, opts.fixed);
  const int dim = layout.dim();
  if (dim == 0) throw ConfigError("mcmc_fit: no free parameters");

  ParamVector start_tmpl = make_param_template(model);
  if (opts.init) start_tmpl = *opts.init;
  else {
    // crude but scale-aware start: data mean and variance
    const Eigen::VectorXd y = data.y.vec();
    start_tmpl.beta0 = y.mean();
    const double s2 =
        std::max((y.array() - start_tmpl.beta0).square().mean(), 1e-300);
    start_tmpl.tau_sq = 0.7 * s2;
    if (model.has_spatial()) {
      start_tmpl.theta0.sd = std::sqrt(0.3 * s2);
      const Eigen::Vector2d lo = data.y.points.colwise().minCoeff();
      const Eigen::Vector2d hi = data.y.points.colwise().maxCoeff();
      const double diam = std::max((hi - lo).norm(), 1e-6);
      start_tmpl.theta0.range = diam / 5.0;
      if (start_tmpl.theta1) {
        start_tmpl.theta1->sd = start_tmpl.theta0.sd;
        start_tmpl.theta1->range = start_tmpl.theta0.range;
      }
    }
    if (model.temporal.kind == TemporalKind::ar1) start_tmpl.rho_ar = 0.3;
  }
  // ensure pinned values live in the template for unpack / param_at
  ParamVector tmpl = layout.unpack(layout.pack(start_tmpl), start_tmpl);

  auto log_post = [&](const Eigen::VectorXd& t) {
    try {
      const ParamVector p = layout.unpack(t, tmpl);
      const double lp = log_prior(prior, model, p);
      if (!std::isfinite(lp)) return kNegInf;
      auto op = make_cov_operator(model, p, data, opts.backend);
      Eigen::VectorXd mu = Eigen::VectorXd::Constant(data.nobs(), p.beta0);
      for (int j = 0; j < data.q(); ++j)
        mu += p.beta1(j) * data.covariate_vec(j);
      return gaussian_loglik(*op, data.y.vec() - mu) + lp +
             layout.log_jacobian(t);
    } catch (const std::runtime_error&) {
      return kNegInf;
    }
  };

  Rng rng = make_rng(opts.seed, Stream::chain);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;

  Eigen::VectorXd t = layout.pack(tmpl);
  double lp = log_post(t);
  if (!std::isfinite(lp))
    throw DiagnosticsError("mcmc_fit: starting point has zero posterior density");

  double log_scale = std::log(opts.initial_step);
  Eigen::VectorXd prop_sd = Eigen::VectorXd::Ones(dim);
  // running coordinate moments shaping the proposal during burn-in
  Eigen::VectorXd run_mean = t, run_m2 = Eigen::VectorXd::Zero(dim);
  long adapt_n = 0;

  PosteriorDraws out;
  out.model = model;
  out.tmpl = tmpl;
  out.prior = prior;
  out.names = layout.names();
  out.draws.resize(opts.n_draws, dim);

  long accepted_main = 0;
  int consecutive_rejects = 0;
  const int total = opts.burn_in + opts.n_draws;
  Eigen::VectorXd t_prop(dim);
  for (int i = 0; i < total; ++i) {
    const double step = std::exp(log_scale);
    for (int j = 0; j < dim; ++j)
      t_prop(j) = t(j) + step * prop_sd(j) * normal(rng);
    const double lp_prop = log_post(t_prop);
    const double log_alpha = lp_prop - lp;
    const double accept_prob =
        std::isfinite(log_alpha) ? std::min(1.0, std::exp(log_alpha)) : 0.0;
    const bool accept = unif(rng) < accept_prob;
    // an accepted proposal that is numerically identical to the current
    // point (underflowed step scale) leaves the chain as stuck as a
    // rejection does, so both count toward the stall window
    const bool moved = accept && (t_prop.array() != t.array()).any();
    if (accept) {
      t = t_prop;
      lp = lp_prop;
    }
    if (moved) {
      consecutive_rejects = 0;
    } else if (++consecutive_rejects >= 1000) {
      throw DiagnosticsError(
          "mcmc_fit: no acceptance over a 1000-draw window");
    }

    if (i < opts.burn_in) {
      // Robbins-Monro on the log step size toward the target rate
      const double gamma = std::pow(static_cast<double>(i + 1), -0.6);
      log_scale += gamma * (accept_prob - opts.target_accept);
      ++adapt_n;
      for (int j = 0; j < dim; ++j) {
        const double d = t(j) - run_mean(j);
        run_mean(j) += d / static_cast<double>(adapt_n);
        run_m2(j) += d * (t(j) - run_mean(j));
      }
      if (adapt_n > 10) {
        for (int j = 0; j < dim; ++j) {
          const double v = run_m2(j) / static_cast<double>(adapt_n - 1);
          if (v > 1e-12) prop_sd(j) = std::sqrt(v);
        }
      }
    } else {
      if (accept) ++accepted_main;
      const ParamVector p = layout.unpack(t, tmpl);
      const int row = i - opts.burn_in;
      for (int j = 0; j < dim; ++j) {
        const std::string& nm = out.names[static_cast<std::size_t>(j)];
        double v;
        if (nm == "beta0") v = p.beta0;
        else if (nm.rfind("beta1_", 0) == 0)
          v = p.beta1(std::stoi(nm.substr(6)) - 1);
        else if (nm == "sd0") v = p.theta0.sd;
        else if (nm == "range0") v = p.theta0.range;
        else if (nm == "sd1") v = p.theta1 ? p.theta1->sd : 0.0;
        else if (nm == "range1") v = p.theta1 ? p.theta1->range : 0.0;
        else if (nm == "tau_sq") v = p.tau_sq;
        else v = p.rho_ar.value_or(0.0);
        out.draws(row, j) = v;
      }
    }
  }

  out.acceptance_rate =
      static_cast<double>(accepted_main) / static_cast<double>(opts.n_draws);
  out.ess.resize(dim);
  for (int j = 0; j < dim; ++j)
    out.ess(j) = effective_sample_size(out.draws.col(j));
  return out;
}

double effective_sample_size(const Eigen::VectorXd& chain) {
  const long n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const double m = chain.mean();
  const Eigen::VectorXd c = chain.array() - m;
  const double var = c.squaredNorm() / static_cast<double>(n);
  if (var <= 0.0) return static_cast<double>(n);
  auto autocov = [&](long k) {
    double s = 0.0;
    for (long i = 0; i + k < n; ++i) s += c(i) * c(i + k);
    return s / static_cast<double>(n);
  };
  // Geyer: sum paired autocorrelations while the pairs stay positive
  double sum = 0.0;
  for (long k = 1; k + 1 < n; k += 2) {
    const double pair = (autocov(k) + autocov(k + 1)) / var;
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double ess = static_cast<double>(n) / (1.0 + 2.0 * sum);
  return std::max(1.0, std::min(ess, static_cast<double>(n)));
}

std::vector<SummaryRow> posterior_summary(const PosteriorDraws& draws,
                                          double level) {
  if (draws.draws.rows() < 100)
    throw DomainError("posterior_summary: need at least 100 draws");
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("posterior_summary: level must be in (0,1)");
  std::vector<SummaryRow> rows;
  const double lo = (1.0 - level) / 2.0;
  for (std::size_t j = 0; j < draws.names.size(); ++j) {
    const Eigen::VectorXd col = draws.draws.col(static_cast<int>(j));
    rows.push_back({draws.names[j], col.mean(), quantile(col, lo),
                    quantile(col, 1.0 - lo)});
  }
  return rows;
}

}  // namespace svcgp
