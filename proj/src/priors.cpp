#include "svcgp/priors.hpp"

#include <cmath>
#include <limits>

#include "svcgp/errors.hpp"

namespace svcgp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

double pc_sd_rate(const PcSdPrior& prior) {
  if (!(prior.u > 0.0) || !(prior.p > 0.0 && prior.p < 1.0))
    throw ConfigError("sd prior requires u > 0 and p in (0,1)");
  return -std::log(prior.p) / prior.u;
}

double pc_sd_logpdf(double sd, const PcSdPrior& prior) {
  if (!(sd > 0.0)) return kNegInf;
  const double lambda = pc_sd_rate(prior);
  return std::log(lambda) - lambda * sd;
}

double pc_sd_tail(double u, const PcSdPrior& prior) {
  if (u <= 0.0) return 1.0;
  return std::exp(-pc_sd_rate(prior) * u);
}

double pc_range_rate(const PcRangePrior& prior) {
  if (!(prior.median > 0.0)) throw ConfigError("range prior median must be > 0");
  return prior.median * std::log(2.0);
}

double pc_range_logpdf(double range, const PcRangePrior& prior) {
  if (!(range > 0.0)) return kNegInf;
  const double lambda = pc_range_rate(prior);
  return std::log(lambda) - 2.0 * std::log(range) - lambda / range;
}

double pc_range_cdf(double range, const PcRangePrior& prior) {
  if (range <= 0.0) return 0.0;
  return std::exp(-pc_range_rate(prior) / range);
}

namespace {

double ar1_base0_distance(double rho) {
  return std::sqrt(-std::log1p(-rho * rho));
}

double ar1_base1_tail(double u, double lambda) {
  // P(rho > u) under the base-1 prior truncated to rho in (-1, 1)
  const double num = 1.0 - std::exp(-lambda * std::sqrt(1.0 - u));
  const double den = 1.0 - std::exp(-lambda * kSqrt2);
  return num / den;
}

}  // namespace

double ar1_pc_rate(const Ar1PcPrior& prior) {
  if (!(prior.a > 0.0 && prior.a < 1.0))
    throw ConfigError("ar1 prior requires a in (0,1)");
  if (prior.base == 0) {
    if (!(prior.u > 0.0 && prior.u < 1.0))
      throw ConfigError("base-0 ar1 prior requires u in (0,1)");
    return -std::log(prior.a) / ar1_base0_distance(prior.u);
  }
  if (prior.base != 1) throw ConfigError("ar1 prior base must be 0 or 1");
  if (!(prior.u > -1.0 && prior.u < 1.0))
    throw ConfigError("base-1 ar1 prior requires u in (-1,1)");
  // Solve P(rho > u) = a for the rate; the tail is increasing in lambda
  // from sqrt(1-u)/sqrt(2) toward 1.
  const double floor_a = std::sqrt(1.0 - prior.u) / kSqrt2;
  if (prior.a <= floor_a)
    throw ConfigError("base-1 ar1 calibration unattainable: need a > " +
                      std::to_string(floor_a) + " for this u");
  double lo = 1e-10, hi = 1.0;
  while (ar1_base1_tail(prior.u, hi) < prior.a) {
    hi *= 2.0;
    if (hi > 1e8) throw NumericalError("ar1 prior rate solve diverged");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ar1_base1_tail(prior.u, mid) < prior.a) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double ar1_pc_logpdf(double rho, const Ar1PcPrior& prior) {
  if (!(std::abs(rho) < 1.0)) return kNegInf;
  const double lambda = ar1_pc_rate(prior);
  if (prior.base == 0) {
    // density (lambda/2) e^(-lambda d(|rho|)) |d'(rho)|
    const double r2 = rho * rho;
    const double d = ar1_base0_distance(rho);
    const double dprime =
        d > 0.0 ? std::abs(rho) / (d * (1.0 - r2)) : 1.0;  // limit at rho=0
    return std::log(0.5 * lambda) - lambda * d + std::log(dprime);
  }
  // base 1: lambda e^(-lambda sqrt(1-rho)) / (2 sqrt(1-rho)), truncated
  const double s = std::sqrt(1.0 - rho);
  const double norm = 1.0 - std::exp(-lambda * kSqrt2);
  return std::log(lambda) - lambda * s - std::log(2.0 * s) - std::log(norm);
}

double ar1_pc_tail(double u, const Ar1PcPrior& prior) {
  const double lambda = ar1_pc_rate(prior);
  if (prior.base == 0) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return std::exp(-lambda * ar1_base0_distance(u));
  }
  if (u <= -1.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return ar1_base1_tail(u, lambda);
}

double gaussian_logpdf(double x, const GaussianPrior& prior) {
  if (!(prior.sd > 0.0)) throw ConfigError("gaussian prior sd must be > 0");
  const double z = (x - prior.mean) / prior.sd;
  return -0.5 * z * z - std::log(prior.sd) -
         0.91893853320467274178;  // ln sqrt(2 pi)
}

double log_prior(const PriorSpec& prior, const ModelSpec& model,
                 const ParamVector& params) {
  double lp = gaussian_logpdf(params.beta0, prior.fixed_effects);
  for (int j = 0; j < params.beta1.size(); ++j)
    lp += gaussian_logpdf(params.beta1(j), prior.fixed_effects);
  if (model.has_spatial()) {
    lp += pc_sd_logpdf(params.theta0.sd, prior.sd0);
    lp += pc_range_logpdf(params.theta0.range, prior.range0);
    if (model.varying_slopes && params.theta1) {
      lp += pc_sd_logpdf(params.theta1->sd, prior.sd1);
      lp += pc_range_logpdf(params.theta1->range, prior.range1);
    }
  }
  if (!(params.tau_sq > 0.0)) return kNegInf;
  const double tau = std::sqrt(params.tau_sq);
  // prior is on tau; add |d tau / d tau_sq| = 1/(2 tau) for a density
  // over tau_sq
  lp += pc_sd_logpdf(tau, prior.nugget) - std::log(2.0 * tau);
  if (model.temporal.kind == TemporalKind::ar1)
    lp += ar1_pc_logpdf(params.rho_ar.value_or(0.0), prior.ar1);
  return lp;
}

}  // namespace svcgp
