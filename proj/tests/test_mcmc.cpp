#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "svcgp/errors.hpp"
#include "svcgp/mcmc.hpp"
#include "svcgp/simulate.hpp"

using namespace svcgp;

namespace {

TrainingData noise_data(std::uint64_t seed, int n, double mu, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  TrainingData d;
  d.y.points.resize(n, 2);
  d.y.values.resize(n, 1);
  d.y.periods = {1};
  for (int k = 0; k < n; ++k) {
    d.y.points.row(k) << unif(rng), unif(rng);
    d.y.values(k, 0) = mu + sd * normal(rng);
  }
  return d;
}

}  // namespace

TEST_CASE("a pinned-variance intercept chain reproduces the conjugate posterior") {
  const double tau_sq = 0.49;
  const TrainingData d = noise_data(814, 100, 1.2, std::sqrt(tau_sq));
  const ModelSpec m0 = make_model_spec(ModelKind::m0, 0);
  PriorSpec prior;  // intercept ~ N(0, 1000^2): essentially flat

  McmcOptions mo;
  mo.n_draws = 50000;
  mo.burn_in = 5000;
  mo.fixed["tau_sq"] = tau_sq;
  mo.seed = 2024;
  const PosteriorDraws post = mcmc_fit(m0, d, prior, mo);
  REQUIRE(post.names == std::vector<std::string>{"beta0"});

  // exact posterior: normal likelihood x normal prior
  const double ybar = d.y.vec().mean();
  const double prec = 100.0 / tau_sq + 1.0 / (1000.0 * 1000.0);
  const double mean_post = (100.0 * ybar / tau_sq) / prec;
  const double sd_post = std::sqrt(1.0 / prec);

  const Eigen::VectorXd chain = post.draws.col(0);
  const double m = chain.mean();
  const double s = std::sqrt((chain.array() - m).square().mean());
  CHECK(std::abs(m - mean_post) <= 0.02 * sd_post);
  CHECK(std::abs(s - sd_post) / sd_post <= 0.05);
  CHECK(post.acceptance_rate >= 0.15);
  CHECK(post.acceptance_rate <= 0.40);
  CHECK(post.ess(0) > 1000.0);
}

TEST_CASE("identical chain settings reproduce the draws exactly") {
  const TrainingData d = noise_data(33, 40, 0.0, 1.0);
  const ModelSpec m0 = make_model_spec(ModelKind::m0, 0);
  McmcOptions mo;
  mo.n_draws = 500;
  mo.burn_in = 200;
  mo.seed = 7;
  const PosteriorDraws a = mcmc_fit(m0, d, {}, mo);
  const PosteriorDraws b = mcmc_fit(m0, d, {}, mo);
  CHECK((a.draws - b.draws).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("a degenerate proposal scale is reported instead of hanging") {
  const TrainingData d = noise_data(5, 30, 0.5, 1.0);
  const ModelSpec m0 = make_model_spec(ModelKind::m0, 0);
  McmcOptions mo;
  mo.n_draws = 1500;
  mo.burn_in = 0;
  mo.initial_step = 1e-320;  // proposals underflow to zero displacement
  CHECK_THROWS_AS(mcmc_fit(m0, d, {}, mo), DiagnosticsError);

  McmcOptions zero;
  zero.initial_step = 0.0;
  CHECK_THROWS_AS(mcmc_fit(m0, d, {}, zero), ConfigError);
}

TEST_CASE("an impossible start is reported up front") {
  const TrainingData d = noise_data(6, 30, 0.5, 1.0);
  const ModelSpec m0 = make_model_spec(ModelKind::m0, 0);

  // out-of-support start: rejected while transforming coordinates
  McmcOptions mo;
  ParamVector bad = make_param_template(m0);
  bad.tau_sq = -1.0;
  mo.init = bad;
  CHECK_THROWS_AS(mcmc_fit(m0, d, {}, mo), DomainError);

  // in-support start whose density underflows to zero
  McmcOptions far;
  ParamVector off = make_param_template(m0);
  off.beta0 = 1e200;
  off.tau_sq = 1.0;
  far.init = off;
  CHECK_THROWS_AS(mcmc_fit(m0, d, {}, far), DiagnosticsError);
}

TEST_CASE("a short spatial chain yields valid natural-scale draws") {
  const Eigen::MatrixX2d pts = [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixX2d p(25, 2);
    for (int k = 0; k < 25; ++k) p.row(k) << unif(rng), unif(rng);
    return p;
  }();
  TrainingData d;
  d.y.points = pts;
  d.y.values = sample_gp(pts, exponential_kernel(0.2, 1.0), {}, 2, 3).values;
  d.y.values.array() += 0.5;
  d.y.periods = {1, 2};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 2; ++t)
    for (int k = 0; k < 25; ++k) d.y.values(k, t) += 0.5 * normal(rng);

  const ModelSpec m1 = make_model_spec(ModelKind::m1, 0);
  McmcOptions mo;
  mo.n_draws = 600;
  mo.burn_in = 400;
  mo.seed = 99;
  const PosteriorDraws post = mcmc_fit(m1, d, {}, mo);
  REQUIRE(post.names ==
          std::vector<std::string>{"beta0", "sd0", "range0", "tau_sq"});
  for (int j = 1; j < 4; ++j)  // all but beta0 live on (0, inf)
    CHECK(post.draws.col(j).minCoeff() > 0.0);
  CHECK(post.acceptance_rate > 0.05);
  CHECK(post.acceptance_rate < 0.6);
  for (int j = 0; j < 4; ++j) CHECK(post.ess(j) >= 1.0);

  // reconstructing a draw reproduces the stored row
  const ParamVector p7 = post.param_at(7);
  CHECK(p7.beta0 == post.draws(7, 0));
  CHECK(p7.theta0.sd == post.draws(7, 1));
  CHECK(p7.theta0.range == post.draws(7, 2));
  CHECK(p7.tau_sq == post.draws(7, 3));
}

TEST_CASE("effective sample size separates white from sticky chains") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  const int n = 20000;
  Eigen::VectorXd iid(n), sticky(n);
  double prev = 0.0;
  const double rho = 0.95;
  const double innov = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    iid(i) = normal(rng);
    prev = rho * prev + innov * normal(rng);
    sticky(i) = prev;
  }
  const double e_iid = effective_sample_size(iid);
  CHECK(e_iid > 0.8 * n);
  CHECK(e_iid <= static_cast<double>(n));
  const double e_sticky = effective_sample_size(sticky);
  const double want = n * (1.0 - rho) / (1.0 + rho);  // ~513
  CHECK(e_sticky > 0.5 * want);
  CHECK(e_sticky < 2.0 * want);
  // an exactly constant chain has zero variance: treated as uninformative
  // rather than stuck (2.0 sums without rounding, so the mean is exact)
  CHECK(effective_sample_size(Eigen::VectorXd::Constant(500, 2.0)) == 500.0);
  // a constant whose mean rounds leaves a perfectly autocorrelated residual
  // pattern: the estimate collapses to the stuck-chain floor
  const double e_const = effective_sample_size(Eigen::VectorXd::Constant(500, 2.2));
  CHECK(e_const >= 1.0);
  CHECK(e_const <= 2.0);
  CHECK(effective_sample_size(Eigen::VectorXd::Zero(3)) == 3.0);
}

TEST_CASE("posterior summaries are empirical means and quantiles") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  PosteriorDraws pd;
  pd.names = {"flat", "gauss"};
  pd.draws.resize(20000, 2);
  for (int i = 0; i < 20000; ++i) {
    pd.draws(i, 0) = 3.2;
    pd.draws(i, 1) = normal(rng);
  }
  const auto rows = posterior_summary(pd, 0.95);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "flat");
  CHECK(rows[0].mean == doctest::Approx(3.2).epsilon(1e-12));
  CHECK(rows[0].lower == doctest::Approx(3.2).epsilon(1e-12));
  CHECK(rows[0].upper == doctest::Approx(3.2).epsilon(1e-12));
  CHECK(std::abs(rows[1].mean) < 0.03);
  CHECK(rows[1].lower == doctest::Approx(-1.96).epsilon(0.03));
  CHECK(rows[1].upper == doctest::Approx(1.96).epsilon(0.03));

  const auto tight = posterior_summary(pd, 0.5);
  CHECK(tight[1].lower == doctest::Approx(-0.674).epsilon(0.06));
  CHECK(tight[1].upper == doctest::Approx(0.674).epsilon(0.06));

  PosteriorDraws small = pd;
  small.draws = pd.draws.topRows(99);
  CHECK_THROWS_AS(posterior_summary(small, 0.95), DomainError);
  CHECK_THROWS_AS(posterior_summary(pd, 0.0), DomainError);
  CHECK_THROWS_AS(posterior_summary(pd, 1.0), DomainError);
}
