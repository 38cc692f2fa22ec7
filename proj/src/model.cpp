#include "svcgp/model.hpp"

#include <cmath>

#include "svcgp/errors.hpp"

namespace svcgp {

ModelSpec make_model_spec(ModelKind kind, int q) {
  if (q < 0) throw ConfigError("model: covariate count must be >= 0");
  ModelSpec m;
  m.kind = kind;
  m.q = q;
  switch (kind) {
    case ModelKind::m0:
      if (q != 0) throw ConfigError("M0 takes no covariates");
      m.temporal = {TemporalKind::iid, 0.0};
      break;
    case ModelKind::m1:
      m.temporal = {TemporalKind::iid, 0.0};
      break;
    case ModelKind::m2:
      m.temporal = {TemporalKind::ar1, 0.0};
      break;
    case ModelKind::m3:
      if (q < 1) throw ConfigError("M3 requires at least one covariate");
      m.temporal = {TemporalKind::ar1, 0.0};
      break;
    case ModelKind::generic:
      break;
  }
  return m;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "M0" || name == "m0") return ModelKind::m0;
  if (name == "M1" || name == "m1") return ModelKind::m1;
  if (name == "M2" || name == "m2") return ModelKind::m2;
  if (name == "M3" || name == "m3") return ModelKind::m3;
  if (name == "generic") return ModelKind::generic;
  throw ConfigError("unknown model kind '" + name +
                    "' (expected M0, M1, M2, M3, or generic)");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::m0: return "M0";
    case ModelKind::m1: return "M1";
    case ModelKind::m2: return "M2";
    case ModelKind::m3: return "M3";
    case ModelKind::generic: return "generic";
  }
  return "?";
}

Eigen::MatrixXd TrainingData::design_matrix() const {
  const long N = nobs();
  Eigen::MatrixXd f(N, 1 + q());
  f.col(0).setOnes();
  for (int j = 0; j < q(); ++j) f.col(1 + j) = covariate_vec(j);
  return f;
}

Eigen::VectorXd TrainingData::covariate_vec(int j) const {
  if (j < 0 || j >= q()) throw DomainError("covariate_vec: index out of range");
  if (x[j].rows() != y.values.rows() || x[j].cols() != y.values.cols())
    throw DataError("covariate_vec: covariate shape mismatch");
  return Eigen::Map<const Eigen::VectorXd>(x[j].data(), x[j].size());
}

namespace {
bool is_positive_param(const std::string& name) {
  return name == "sd0" || name == "range0" || name == "sd1" ||
         name == "range1" || name == "tau_sq";
}
}  // namespace

ParamLayout::ParamLayout(const ModelSpec& model, bool include_betas,
                         const std::map<std::string, double>& fixed)
    : fixed_(fixed), q_(model.q), include_betas_(include_betas) {
  auto add = [&](const std::string& name) {
    if (!fixed_.count(name)) names_.push_back(name);
  };
  if (include_betas) {
    add("beta0");
    for (int j = 1; j <= model.q; ++j) add("beta1_" + std::to_string(j));
  }
  if (model.has_spatial()) {
    add("sd0");
    add("range0");
    if (model.varying_slopes) {
      add("sd1");
      add("range1");
    }
  }
  add("tau_sq");
  if (model.temporal.kind == TemporalKind::ar1) add("rho_ar");
}

Eigen::VectorXd ParamLayout::pack(const ParamVector& p) const {
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i) {
    const std::string& nm = names_[i];
    double nat;
    if (nm == "beta0") nat = p.beta0;
    else if (nm.rfind("beta1_", 0) == 0)
      nat = p.beta1(std::stoi(nm.substr(6)) - 1);
    else if (nm == "sd0") nat = p.theta0.sd;
    else if (nm == "range0") nat = p.theta0.range;
    else if (nm == "sd1") nat = p.theta1 ? p.theta1->sd : 1.0;
    else if (nm == "range1") nat = p.theta1 ? p.theta1->range : 1.0;
    else if (nm == "tau_sq") nat = p.tau_sq;
    else nat = p.rho_ar.value_or(0.0);  // rho_ar

    if (is_positive_param(nm)) {
      if (!(nat > 0.0))
        throw DomainError("pack: parameter " + nm + " must be > 0");
      v(i) = std::log(nat);
    } else if (nm == "rho_ar") {
      if (!(std::abs(nat) < 1.0)) throw DomainError("pack: |rho_ar| must be < 1");
      v(i) = std::atanh(nat);
    } else {
      v(i) = nat;
    }
  }
  return v;
}

ParamVector ParamLayout::unpack(const Eigen::VectorXd& v,
                                const ParamVector& tmpl) const {
  if (v.size() != dim()) throw DomainError("unpack: dimension mismatch");
  ParamVector p = tmpl;
  if (p.beta1.size() != q_) p.beta1 = Eigen::VectorXd::Zero(q_);
  auto apply = [&](const std::string& nm, double nat) {
    if (nm == "beta0") p.beta0 = nat;
    else if (nm.rfind("beta1_", 0) == 0)
      p.beta1(std::stoi(nm.substr(6)) - 1) = nat;
    else if (nm == "sd0") p.theta0.sd = nat;
    else if (nm == "range0") p.theta0.range = nat;
    else if (nm == "sd1") { if (p.theta1) p.theta1->sd = nat; }
    else if (nm == "range1") { if (p.theta1) p.theta1->range = nat; }
    else if (nm == "tau_sq") p.tau_sq = nat;
    else if (nm == "rho_ar") p.rho_ar = nat;
  };
  for (int i = 0; i < dim(); ++i) {
    const std::string& nm = names_[i];
    double nat;
    if (is_positive_param(nm)) nat = std::exp(v(i));
    else if (nm == "rho_ar") nat = std::tanh(v(i));
    else nat = v(i);
    apply(nm, nat);
  }
  for (const auto& [nm, nat] : fixed_) apply(nm, nat);
  return p;
}

double ParamLayout::log_jacobian(const Eigen::VectorXd& v) const {
  if (v.size() != dim()) throw DomainError("log_jacobian: dimension mismatch");
  double lj = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const std::string& nm = names_[i];
    if (is_positive_param(nm)) {
      lj += v(i);  // d exp(t)/dt = exp(t)
    } else if (nm == "rho_ar") {
      const double r = std::tanh(v(i));
      lj += std::log1p(-r * r);  // d tanh(t)/dt = 1 - tanh^2
    }
  }
  return lj;
}

ParamVector make_param_template(const ModelSpec& model) {
  ParamVector p;
  p.beta1 = Eigen::VectorXd::Zero(model.q);
  p.theta0 = {model.family0, 1.0, 1.0, model.nu0};
  if (model.varying_slopes)
    p.theta1 = KernelParams{model.family1, 1.0, 1.0, model.nu1};
  p.tau_sq = 1.0;
  if (model.temporal.kind == TemporalKind::ar1) p.rho_ar = 0.0;
  return p;
}

}  // namespace svcgp
