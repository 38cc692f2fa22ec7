#pragma once

// Slow, obvious reference implementations that the optimized library code is
// checked against.  Everything here takes a different route on purpose:
// entrywise double loops instead of structured operators, partial-pivot LU
// instead of Cholesky, recursive Simpson instead of closed forms.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "svcgp/covariance.hpp"
#include "svcgp/model.hpp"

namespace oracle {

// log N(resid; 0, S) with an explicit log-determinant and a linear solve.
inline double mvn_logpdf(const Eigen::VectorXd& resid,
                         const Eigen::MatrixXd& S) {
  const long n = resid.size();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
  double logdet = 0.0;
  for (long i = 0; i < n; ++i)
    logdet += std::log(std::abs(lu.matrixLU()(i, i)));
  const Eigen::VectorXd alpha = lu.solve(resid);
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (static_cast<double>(n) * kLog2Pi + logdet + resid.dot(alpha));
}

inline double temporal_weight(const svcgp::ModelSpec& model,
                              const svcgp::ParamVector& p, long long ta,
                              long long tb) {
  if (model.temporal.kind == svcgp::TemporalKind::iid)
    return ta == tb ? 1.0 : 0.0;
  if (ta == tb) return 1.0;
  return std::pow(p.rho_ar.value(),
                  static_cast<double>(ta > tb ? ta - tb : tb - ta));
}

// Covariance of one pair of observations (period label, point, covariate row)
// written straight from the model definition: temporal weight times the
// intercept-process kernel, plus per-covariate slope-process terms when the
// slopes vary, plus the nugget when the two observations are the same one.
inline double pair_cov(const svcgp::ModelSpec& model,
                       const svcgp::ParamVector& p, long long ta,
                       const Eigen::Vector2d& sa, const Eigen::VectorXd& xa,
                       long long tb, const Eigen::Vector2d& sb,
                       const Eigen::VectorXd& xb, bool same_observation) {
  double v = 0.0;
  if (model.has_spatial()) {
    const double w = temporal_weight(model, p, ta, tb);
    if (w != 0.0) {
      const double d = (sa - sb).norm();
      double s = svcgp::kernel_eval(p.theta0, d);
      if (model.varying_slopes) {
        const double k1 = svcgp::kernel_eval(*p.theta1, d);
        for (int j = 0; j < xa.size(); ++j) s += k1 * xa(j) * xb(j);
      }
      v += w * s;
    }
  }
  if (same_observation) v += p.tau_sq;
  return v;
}

inline Eigen::VectorXd covariate_row(const svcgp::TrainingData& d, int k,
                                     int t) {
  Eigen::VectorXd x(d.q());
  for (int j = 0; j < d.q(); ++j) x(j) = d.x[static_cast<std::size_t>(j)](k, t);
  return x;
}

// Full N x N response covariance over the training observations in
// period-major order, assembled entry by entry.
inline Eigen::MatrixXd response_cov(const svcgp::ModelSpec& model,
                                    const svcgp::ParamVector& p,
                                    const svcgp::TrainingData& d) {
  const int n = d.n(), T = d.T();
  const long N = static_cast<long>(n) * T;
  Eigen::MatrixXd S(N, N);
  for (long a = 0; a < N; ++a) {
    const int ta = static_cast<int>(a / n), ka = static_cast<int>(a % n);
    for (long b = a; b < N; ++b) {
      const int tb = static_cast<int>(b / n), kb = static_cast<int>(b % n);
      const double v = pair_cov(
          model, p, d.y.periods[static_cast<std::size_t>(ta)],
          d.y.points.row(ka).transpose(), covariate_row(d, ka, ta),
          d.y.periods[static_cast<std::size_t>(tb)],
          d.y.points.row(kb).transpose(), covariate_row(d, kb, tb), a == b);
      S(a, b) = v;
      S(b, a) = v;
    }
  }
  return S;
}

// Same matrix with the compact taper applied to every spatial kernel factor
// (the nugget diagonal is untouched).
inline Eigen::MatrixXd response_cov_tapered(const svcgp::ModelSpec& model,
                                            const svcgp::ParamVector& p,
                                            const svcgp::TrainingData& d,
                                            double taper_range) {
  const int n = d.n(), T = d.T();
  const long N = static_cast<long>(n) * T;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  for (long a = 0; a < N; ++a) {
    const int ta = static_cast<int>(a / n), ka = static_cast<int>(a % n);
    for (long b = a; b < N; ++b) {
      const int tb = static_cast<int>(b / n), kb = static_cast<int>(b % n);
      double v = 0.0;
      if (model.has_spatial()) {
        const double w =
            temporal_weight(model, p, d.y.periods[static_cast<std::size_t>(ta)],
                            d.y.periods[static_cast<std::size_t>(tb)]);
        const double dist =
            (d.y.points.row(ka) - d.y.points.row(kb)).norm();
        const double taper = svcgp::wendland1(dist, taper_range);
        if (w != 0.0 && taper > 0.0) {
          double s = svcgp::kernel_eval(p.theta0, dist) * taper;
          if (model.varying_slopes) {
            const double k1 = svcgp::kernel_eval(*p.theta1, dist) * taper;
            const Eigen::VectorXd xa = covariate_row(d, ka, ta);
            const Eigen::VectorXd xb = covariate_row(d, kb, tb);
            for (int j = 0; j < xa.size(); ++j) s += k1 * xa(j) * xb(j);
          }
          v = w * s;
        }
      }
      if (a == b) v += p.tau_sq;
      S(a, b) = v;
      S(b, a) = v;
    }
  }
  return S;
}

inline Eigen::VectorXd mean_vec(const svcgp::ParamVector& p,
                                const svcgp::TrainingData& d) {
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(d.nobs(), p.beta0);
  for (int j = 0; j < d.q(); ++j) mu += p.beta1(j) * d.covariate_vec(j);
  return mu;
}

// Joint blocks for conditioning targets on the training observations.  A
// target row that is literally one of the observations (same period label,
// bit-identical coordinates) shares its noise draw, so the nugget enters the
// cross term for such pairs.
struct JointBlocks {
  Eigen::MatrixXd s11;     // N x N observation covariance
  Eigen::MatrixXd s12;     // N x m cross block
  Eigen::VectorXd s22;     // m target marginal variances
  Eigen::VectorXd mu1;     // N observation means
  Eigen::VectorXd mu2;     // m target means
};

inline JointBlocks joint_blocks(const svcgp::ModelSpec& model,
                                const svcgp::ParamVector& p,
                                const svcgp::TrainingData& d,
                                const std::vector<long long>& target_periods,
                                const Eigen::MatrixX2d& target_points,
                                const Eigen::MatrixXd& target_covariates) {
  const int n = d.n(), T = d.T();
  const long N = static_cast<long>(n) * T;
  const int m = static_cast<int>(target_points.rows());
  JointBlocks jb;
  jb.s11 = response_cov(model, p, d);
  jb.mu1 = mean_vec(p, d);
  jb.s12.resize(N, m);
  jb.s22.resize(m);
  jb.mu2.resize(m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd xi(d.q());
    for (int j = 0; j < d.q(); ++j) xi(j) = target_covariates(i, j);
    double mu = p.beta0;
    for (int j = 0; j < d.q(); ++j) mu += p.beta1(j) * xi(j);
    jb.mu2(i) = mu;
    jb.s22(i) = pair_cov(model, p, target_periods[static_cast<std::size_t>(i)],
                         target_points.row(i).transpose(), xi,
                         target_periods[static_cast<std::size_t>(i)],
                         target_points.row(i).transpose(), xi, true);
    for (long a = 0; a < N; ++a) {
      const int ta = static_cast<int>(a / n), ka = static_cast<int>(a % n);
      const bool same_obs =
          d.y.periods[static_cast<std::size_t>(ta)] ==
              target_periods[static_cast<std::size_t>(i)] &&
          d.y.points(ka, 0) == target_points(i, 0) &&
          d.y.points(ka, 1) == target_points(i, 1);
      jb.s12(a, i) = pair_cov(
          model, p, d.y.periods[static_cast<std::size_t>(ta)],
          d.y.points.row(ka).transpose(), covariate_row(d, ka, ta),
          target_periods[static_cast<std::size_t>(i)],
          target_points.row(i).transpose(), xi, same_obs);
    }
  }
  return jb;
}

// Partitioned-Gaussian conditional of the targets given observed values y1.
struct Conditional {
  Eigen::VectorXd mean, var;
};

inline Conditional condition(const JointBlocks& jb, const Eigen::VectorXd& y1) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jb.s11);
  const Eigen::VectorXd w = lu.solve(y1 - jb.mu1);
  const Eigen::MatrixXd v = lu.solve(jb.s12);
  Conditional out;
  out.mean = jb.mu2 + jb.s12.transpose() * w;
  out.var.resize(jb.s22.size());
  for (int i = 0; i < jb.s22.size(); ++i)
    out.var(i) = jb.s22(i) - jb.s12.col(i).dot(v.col(i));
  return out;
}

// Adaptive Simpson quadrature.
namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a,
                    double fa, double b, double fb, double fm, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
         adapt(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adapt(f, a, fa, b, fb, fm, whole, tol, depth);
}

// Small random training sets spanning the model zoo, for oracle-equivalence
// loops.  Points are scattered uniformly (no lattice needed by the
// likelihood), responses are arbitrary finite values.
struct Instance {
  svcgp::ModelSpec model;
  svcgp::ParamVector params;
  svcgp::TrainingData data;
};

inline Instance random_instance(std::mt19937_64& rng, svcgp::ModelKind kind,
                                int n, int T, int q = 0,
                                bool varying_slopes = false) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;

  Instance inst;
  inst.model = svcgp::make_model_spec(kind, q);
  if (kind == svcgp::ModelKind::generic) {
    inst.model.varying_slopes = varying_slopes;
    inst.model.temporal.kind =
        unif(rng) < 0.5 ? svcgp::TemporalKind::iid : svcgp::TemporalKind::ar1;
  }
  const double nus[] = {0.5, 1.0, 1.5};
  inst.model.nu0 = nus[static_cast<int>(unif(rng) * 3.0) % 3];
  inst.model.family0 =
      unif(rng) < 0.3 ? svcgp::KernelFamily::exponential
                      : svcgp::KernelFamily::matern;

  inst.params = svcgp::make_param_template(inst.model);
  inst.params.beta0 = normal(rng);
  for (int j = 0; j < q; ++j) inst.params.beta1(j) = normal(rng);
  inst.params.theta0.range = 0.1 + 0.3 * unif(rng);
  inst.params.theta0.sd = 0.5 + 1.5 * unif(rng);
  if (inst.params.theta1) {
    inst.params.theta1->range = 0.1 + 0.3 * unif(rng);
    inst.params.theta1->sd = 0.5 + 1.5 * unif(rng);
  }
  inst.params.tau_sq = 0.05 + 0.45 * unif(rng);
  if (inst.model.temporal.kind == svcgp::TemporalKind::ar1)
    inst.params.rho_ar = -0.8 + 1.6 * unif(rng);

  inst.data.y.points.resize(n, 2);
  for (int k = 0; k < n; ++k) {
    inst.data.y.points(k, 0) = unif(rng);
    inst.data.y.points(k, 1) = unif(rng);
  }
  inst.data.y.values.resize(n, T);
  for (int t = 0; t < T; ++t) {
    inst.data.y.periods.push_back(t + 1);
    for (int k = 0; k < n; ++k)
      inst.data.y.values(k, t) = inst.params.beta0 + normal(rng);
  }
  for (int j = 0; j < q; ++j) {
    Eigen::MatrixXd xj(n, T);
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < n; ++k) xj(k, t) = normal(rng);
    inst.data.x.push_back(std::move(xj));
  }
  return inst;
}

}  // namespace oracle
