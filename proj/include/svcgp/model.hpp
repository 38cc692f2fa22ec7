#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svcgp/covariance.hpp"
#include "svcgp/field.hpp"

namespace svcgp {

// Model family for the downscaling response:
//   m0      constant intercept + white noise
//   m1      spatially varying intercept, independent across periods
//   m2      spatially varying intercept, AR(1) across periods
//   m3      m2 plus covariates with fixed (non-varying) slopes
//   generic any combination, including spatially varying slopes
enum class ModelKind { m0, m1, m2, m3, generic };

struct ModelSpec {
  ModelKind kind = ModelKind::m1;
  int q = 0;                   // covariate count
  TemporalStructure temporal;  // dependence of coefficient processes in time
  bool varying_slopes = false; // slopes carry their own spatial process
  KernelFamily family0 = KernelFamily::matern;
  KernelFamily family1 = KernelFamily::exponential;
  double nu0 = 1.0;  // smoothness, held fixed during estimation
  double nu1 = 0.5;

  bool has_spatial() const { return kind != ModelKind::m0; }
};

// Named constructor enforcing the per-kind invariants.
ModelSpec make_model_spec(ModelKind kind, int q);
ModelKind parse_model_kind(const std::string& name);  // "M0".."M3", "generic"
std::string model_kind_name(ModelKind kind);

// Every estimable parameter of the response model.  beta0/beta1 are the
// fixed-effect intercept and slopes; theta0/theta1 the kernel parameters of
// the intercept and slope processes; tau_sq the white-noise variance;
// rho_ar the temporal correlation (present only under ar1 dependence).
struct ParamVector {
  double beta0 = 0.0;
  Eigen::VectorXd beta1;  // size q
  KernelParams theta0;
  std::optional<KernelParams> theta1;
  double tau_sq = 1.0;
  std::optional<double> rho_ar;
};

// Response observations and aligned covariates, ready for likelihood work.
// x[j] has the same shape as y.values; entry (k, t) is covariate j at the
// coarse neighbor of fine point k in period t.
struct TrainingData {
  SpaceTimeField y;
  std::vector<Eigen::MatrixXd> x;

  int n() const { return y.n(); }
  int T() const { return y.T(); }
  long nobs() const { return static_cast<long>(y.n()) * y.T(); }
  int q() const { return static_cast<int>(x.size()); }

  // Design matrix of the fixed effects: column 0 all ones, column j the
  // flattened covariate j, rows in period-major observation order.
  Eigen::MatrixXd design_matrix() const;
  // Flattened covariate j (period-major), the scaling vector of the
  // slope-process covariance structure.
  Eigen::VectorXd covariate_vec(int j) const;
};

// Mapping between ParamVector and the unconstrained optimization /sampling
// coordinates: log for positive parameters, atanh for rho_ar, identity for
// fixed effects.  Entries in `fixed` are excluded from the coordinate
// vector and pinned at the given natural-scale value.
class ParamLayout {
 public:
  // include_betas: whether fixed effects are free coordinates (MCMC) or
  // handled outside the layout (profiled ML).
  ParamLayout(const ModelSpec& model, bool include_betas,
              const std::map<std::string, double>& fixed = {});

  int dim() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  Eigen::VectorXd pack(const ParamVector& p) const;
  // Rebuilds a full ParamVector from coordinates, taking families, nu, and
  // pinned values from `tmpl`.
  ParamVector unpack(const Eigen::VectorXd& v, const ParamVector& tmpl) const;

  // Sum of log |d(natural)/d(coordinate)| over free positive/bounded
  // parameters; the change-of-variables term for densities on natural scale.
  double log_jacobian(const Eigen::VectorXd& v) const;

 private:
  std::vector<std::string> names_;  // coordinate names in order
  std::map<std::string, double> fixed_;
  int q_ = 0;
  bool include_betas_ = false;
};

// A template ParamVector for `model` with families/smoothness filled in and
// placeholder values for the rest (used as the unpack template and as the
// base for start heuristics).
ParamVector make_param_template(const ModelSpec& model);

}  // namespace svcgp
