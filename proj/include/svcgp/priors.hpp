#pragma once

#include "svcgp/model.hpp"

namespace svcgp {

// Exponential tail prior on a standard deviation: P(sd > u) = p, i.e. an
// exponential density with rate -ln(p)/u.
struct PcSdPrior {
  double u = 0.32;
  double p = 0.01;
};

// Inverse-type range prior pi(r) = (lambda/r^2) exp(-lambda/r) calibrated
// through its median: P(range < median) = 0.5 gives lambda = median*ln 2.
struct PcRangePrior {
  double median = 700.0;
};

// Penalized-complexity prior for an AR(1) correlation, shrinking toward a
// base model.  base = 1 (default): base model rho = 1, distance
// d = sqrt(1-rho), calibrated through P(rho > u) = a.  base = 0: base
// model rho = 0, distance d = sqrt(-ln(1-rho^2)), calibrated through
// P(|rho| > u) = a (u must then be in (0,1)).
struct Ar1PcPrior {
  int base = 1;
  double u = 0.0;
  double a = 0.9;
};

struct GaussianPrior {
  double mean = 0.0;
  double sd = 1000.0;
};

// Priors for every estimable parameter.  The nugget prior acts on
// tau = sqrt(tau_sq).
struct PriorSpec {
  PcSdPrior sd0, sd1;
  PcRangePrior range0, range1;
  PcSdPrior nugget;
  Ar1PcPrior ar1;
  GaussianPrior fixed_effects;
};

double pc_sd_rate(const PcSdPrior& prior);
double pc_sd_logpdf(double sd, const PcSdPrior& prior);
double pc_sd_tail(double u, const PcSdPrior& prior);  // P(sd > u)

double pc_range_rate(const PcRangePrior& prior);
double pc_range_logpdf(double range, const PcRangePrior& prior);
double pc_range_cdf(double range, const PcRangePrior& prior);

double ar1_pc_rate(const Ar1PcPrior& prior);  // solved from the calibration
double ar1_pc_logpdf(double rho, const Ar1PcPrior& prior);
// base 1: P(rho > u); base 0: P(|rho| > u).
double ar1_pc_tail(double u, const Ar1PcPrior& prior);

double gaussian_logpdf(double x, const GaussianPrior& prior);

// Joint log prior density over the natural parameters of the model
// (beta0, beta1, sd0, range0, [sd1, range1], tau_sq, [rho_ar]); -inf
// outside the support.  The nugget prior on tau carries the tau -> tau_sq
// change of variables.
double log_prior(const PriorSpec& prior, const ModelSpec& model,
                 const ParamVector& params);

}  // namespace svcgp
