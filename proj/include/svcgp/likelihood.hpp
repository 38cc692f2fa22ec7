#pragma once

#include <memory>

#include "svcgp/model.hpp"

namespace svcgp {

// How the response covariance is represented during likelihood work.
struct Backend {
  enum class Kind { exact, tapered };
  Kind kind = Kind::exact;
  double taper_range = 0.0;  // required when kind == tapered

  static Backend exact() { return {Kind::exact, 0.0}; }
  static Backend tapered(double rho_star) {
    return {Kind::tapered, rho_star};
  }
};

// Factorized response covariance Sigma_Y over the training observations
// (period-major order).  Only log-determinant and solve are exposed; no
// implementation forms an explicit inverse.
class CovOperator {
 public:
  virtual ~CovOperator() = default;
  virtual long size() const = 0;
  virtual double logdet() const = 0;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
  virtual double jitter() const { return 0.0; }

  Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& rhs) const;
};

std::unique_ptr<CovOperator> make_cov_operator(const ModelSpec& model,
                                               const ParamVector& params,
                                               const TrainingData& data,
                                               const Backend& backend);

// log N(resid; 0, Sigma) for a factorized Sigma.
double gaussian_loglik(const CovOperator& op, const Eigen::VectorXd& resid);

// Log-likelihood of the data under the model at the given parameters,
// fixed effects included as stored in params.
double loglik_exact(const ModelSpec& model, const ParamVector& params,
                    const TrainingData& data);
double loglik_tapered(const ModelSpec& model, const ParamVector& params,
                      const TaperSpec& taper, const TrainingData& data);

// Generalized least squares of y on F under a factorized covariance:
// delta = (F' S^-1 F)^-1 F' S^-1 y, with the normal matrix kept for
// downstream uncertainty terms.
struct GlsResult {
  Eigen::VectorXd delta;
  Eigen::MatrixXd normal;  // F' S^-1 F
};
GlsResult gls(const CovOperator& op, const Eigen::MatrixXd& F,
              const Eigen::VectorXd& y);

// Likelihood with the fixed effects profiled out by GLS at the given
// covariance parameters (the fixed-effect entries of params are ignored).
struct ProfiledLoglik {
  double loglik = 0.0;
  double beta0 = 0.0;
  Eigen::VectorXd beta1;
  double jitter = 0.0;
};
ProfiledLoglik loglik_profiled(const ModelSpec& model,
                               const ParamVector& params,
                               const TrainingData& data,
                               const Backend& backend);

}  // namespace svcgp
