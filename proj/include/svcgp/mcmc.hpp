#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svcgp/likelihood.hpp"
#include "svcgp/priors.hpp"

namespace svcgp {

struct McmcOptions {
  int n_draws = 20000;   // post burn-in draws kept
  int burn_in = 5000;    // adaptation phase, discarded
  double target_accept = 0.234;
  double initial_step = 0.1;  // starting global proposal scale
  Backend backend = Backend::exact();
  std::map<std::string, double> fixed;  // pin named parameters
  std::optional<ParamVector> init;
  std::uint64_t seed = 0;
};

// Posterior sample on the natural parameter scale, one column per free
// parameter (column names in `names`).
struct PosteriorDraws {
  Eigen::MatrixXd draws;  // n_draws x dim
  std::vector<std::string> names;
  double acceptance_rate = 0.0;  // post burn-in
  Eigen::VectorXd ess;           // per parameter
  ModelSpec model;
  ParamVector tmpl;  // carries families, smoothness, pinned values
  PriorSpec prior;

  ParamVector param_at(int i) const;  // reconstruct draw i
};

// Adaptive random-walk Metropolis on transformed parameters (log /atanh),
// targeting likelihood(backend) x PC priors.  The proposal is diagonal;
// its global scale follows a Robbins-Monro recursion toward the target
// acceptance rate and its shape tracks the running coordinate variances.
// Both freeze when burn-in ends.  Throws DiagnosticsError if the chain
// fails to move over 1000 consecutive proposals (all rejected, or the
// proposal scale has degenerated to zero displacement).
PosteriorDraws mcmc_fit(const ModelSpec& model, const TrainingData& data,
                        const PriorSpec& prior, const McmcOptions& opts = {});

// Effective sample size by the initial-positive-sequence rule on the
// chain's autocorrelations.
double effective_sample_size(const Eigen::VectorXd& chain);

// Per-parameter mean and central credible interval at the given level,
// using linear-interpolation empirical quantiles.
struct SummaryRow {
  std::string name;
  double mean, lower, upper;
};
std::vector<SummaryRow> posterior_summary(const PosteriorDraws& draws,
                                          double level);

}  // namespace svcgp
