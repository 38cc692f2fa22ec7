#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "svcgp/likelihood.hpp"
#include "svcgp/optim.hpp"

namespace svcgp {

struct FitOptions {
  Backend backend = Backend::exact();
  NelderMeadOptions nm;
  int restarts = 3;  // simplex searches from jittered starts
  // Pin named parameters at fixed natural-scale values during estimation
  // (keys as in ParamLayout: "rho_ar", "tau_sq", "sd0", ...).
  std::map<std::string, double> fixed;
  std::optional<ParamVector> init;  // overrides the data-driven start
  std::uint64_t seed = 0;           // drives the restart jitter
};

struct FitResult {
  ModelSpec model;
  ParamVector estimates;  // covariance parameters and GLS fixed effects
  double loglik = 0.0;
  int evals = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  std::string method;    // "ml-exact" or "ml-tapered"
  double jitter = 0.0;   // diagonal jitter applied at the optimum, if any
};

// Maximum likelihood over log-transformed positive parameters (and
// atanh-transformed rho_ar), fixed effects profiled out by GLS.  M0 is
// solved in closed form.  Returns converged=false (no exception) when no
// restart meets the stopping rule.
FitResult fit_ml(const ModelSpec& model, const TrainingData& data,
                 const FitOptions& opts = {});

// Data-driven starting values: moment-based noise split, range from the
// point spread, temporal correlation from a lag-1 estimate placeholder.
ParamVector default_start(const ModelSpec& model, const TrainingData& data);

}  // namespace svcgp
