#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svcgp/fit.hpp"
#include "svcgp/mcmc.hpp"
#include "svcgp/model.hpp"

namespace svcgp {

// Prediction targets: one row per (period, point), with the covariate values
// that enter the regional mean at that row (m x q; zero columns when q = 0).
struct PredictionTargets {
  std::vector<long long> periods;
  Eigen::MatrixX2d points;
  Eigen::MatrixXd covariates;

  int m() const { return static_cast<int>(points.rows()); }
};

enum class PredictionScale { model, physical };

struct PredictionResult {
  std::vector<long long> periods;
  Eigen::MatrixX2d points;
  Eigen::VectorXd mean, lower, upper;
  double level = 0.95;
  PredictionScale scale = PredictionScale::model;

  int m() const { return static_cast<int>(points.rows()); }
};

struct PredictOptions {
  double level = 0.95;
  // Score a row using only training periods other than its own. Off, a target
  // that coincides exactly with a training observation is reproduced with zero
  // variance (the noise term is shared); on, every row is an out-of-period
  // forecast, which for an iid-in-time model reduces to the marginal law.
  bool exclude_same_period = false;
};

struct McmcPredictOptions {
  PredictOptions base;
  int n_draws = 500;       // thinned draws entering the mixture
  std::uint64_t seed = 0;  // drives the ancestral response samples
};

// Conditional mean and variance of the response at the targets given the
// training observations, with all parameters (including the fixed effects)
// taken as known. The white-noise-only model has no conditioning structure and
// returns its marginal law.
struct ConditionalMoments {
  Eigen::VectorXd mean, var;
};
ConditionalMoments conditional_moments(const ModelSpec& model,
                                       const ParamVector& params,
                                       const TrainingData& data,
                                       const PredictionTargets& targets,
                                       bool exclude_same_period = false);

// Plug-in prediction at the fitted parameters: central normal interval
// mean +/- z * sd. For the white-noise-only model the predictive variance
// carries the classical mean-uncertainty factor, tau^2 * (1 + 1/N), since it
// is available in closed form; spatial models condition on the fitted fixed
// effects as given.
PredictionResult predict_response(const FitResult& fit, const TrainingData& data,
                                  const PredictionTargets& targets,
                                  const PredictOptions& opts = {});

// Posterior-predictive mixture: evenly thinned draws, per-draw conditional
// moments plus a sampled response; interval = empirical quantiles across
// draws, point prediction = average of the per-draw conditional means.
PredictionResult predict_response(const PosteriorDraws& draws,
                                  const TrainingData& data,
                                  const PredictionTargets& targets,
                                  const McmcPredictOptions& opts = {});

// Shift the response predictions by the coarse-field values to recover the
// fine-scale variable itself; offset(i) is added to mean/lower/upper of row i.
PredictionResult add_offset(const PredictionResult& pred,
                            const Eigen::VectorXd& offset);

// exp-map a model-scale prediction to the physical scale (monotone, so the
// interval maps endpoint-wise).
PredictionResult back_transform(const PredictionResult& pred);

// Station records for evaluation against point observations; value may be
// missing, such rows are dropped and counted.
struct StationRecord {
  long long period = 0;
  double x = 0.0, y = 0.0;
  std::optional<double> value;
};

struct StationPairs {
  std::vector<long long> periods;
  Eigen::VectorXd observed, predicted, lower, upper;
  int dropped_missing = 0;
  int outside_extent = 0;

  int n() const { return static_cast<int>(observed.size()); }
};

// Match each station to the nearest predicted location in its period and pair
// the observation with that row's prediction. Stations outside the predicted
// bounding box still match the nearest node but are counted as warnings.
StationPairs evaluate_at_stations(const PredictionResult& pred,
                                  const std::vector<StationRecord>& stations);

}  // namespace svcgp
