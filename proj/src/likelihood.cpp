#include "svcgp/likelihood.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "svcgp/errors.hpp"

namespace svcgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_params(const ModelSpec& model, const ParamVector& params,
                  const TrainingData& data) {
  if (data.n() < 1 || data.T() < 1) throw DataError("likelihood: empty data");
  if (data.q() != model.q)
    throw DataError("likelihood: covariate count mismatch");
  if (!(params.tau_sq > 0.0))
    throw DomainError("likelihood: tau_sq must be > 0");
  if (model.varying_slopes && !params.theta1)
    throw DomainError("likelihood: varying slopes require theta1");
  if (model.temporal.kind == TemporalKind::ar1) {
    if (!params.rho_ar) throw DomainError("likelihood: ar1 requires rho_ar");
    if (!(std::abs(*params.rho_ar) < 1.0))
      throw DomainError("likelihood: |rho_ar| must be < 1");
  }
}

// Temporal structure with the correlation taken from the current parameter
// vector rather than the structural default baked into the model spec.
TemporalStructure effective_temporal(const ModelSpec& model,
                                     const ParamVector& params) {
  TemporalStructure ts = model.temporal;
  if (ts.kind == TemporalKind::ar1) ts.rho_ar = *params.rho_ar;
  return ts;
}

// M0: Sigma = tau^2 I.
class NuggetOp final : public CovOperator {
 public:
  NuggetOp(long n, double tau_sq) : n_(n), tau_sq_(tau_sq) {}
  long size() const override { return n_; }
  double logdet() const override { return n_ * std::log(tau_sq_); }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    return rhs / tau_sq_;
  }

 private:
  long n_;
  double tau_sq_;
};

// Periods independent and identically structured: Sigma_Y is block diagonal
// with T copies of A = Sigma0 + tau^2 I; one factorization serves all
// periods.
class IidBlockOp final : public CovOperator {
 public:
  IidBlockOp(const Eigen::MatrixX2d& pts, const KernelParams& theta0,
             double tau_sq, int T)
      : n_(static_cast<int>(pts.rows())), T_(T) {
    Eigen::MatrixXd a = cov_matrix(pts, theta0);
    a.diagonal().array() += tau_sq;
    auto res = chol_with_jitter(std::move(a));
    llt_ = std::move(res.llt);
    jitter_ = res.jitter;
    block_logdet_ =
        2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  }
  long size() const override { return static_cast<long>(n_) * T_; }
  double logdet() const override { return T_ * block_logdet_; }
  double jitter() const override { return jitter_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    Eigen::Map<const Eigen::MatrixXd> v(rhs.data(), n_, T_);
    Eigen::MatrixXd out = llt_.solve(v);
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
  }

 private:
  int n_, T_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
  double block_logdet_ = 0.0;
};

// AR(1) periods: Sigma_Y = R (x) Sigma0 + tau^2 I.  With Sigma0 = Q L Q'
// and R = P S P', the whole matrix diagonalizes in the (P (x) Q) basis with
// spectrum L_j S_k + tau^2, so solves reduce to two small dense transforms.
class KroneckerAr1Op final : public CovOperator {
 public:
  KroneckerAr1Op(const Eigen::MatrixX2d& pts, const KernelParams& theta0,
                 double tau_sq, double rho,
                 const std::vector<long long>& periods)
      : n_(static_cast<int>(pts.rows())), T_(static_cast<int>(periods.size())) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(cov_matrix(pts, theta0));
    if (es0.info() != Eigen::Success)
      throw NumericalError("spatial eigendecomposition failed");
    q_ = es0.eigenvectors();
    // tiny negative eigenvalues are eigensolver noise on a PSD kernel matrix
    Eigen::VectorXd lam = es0.eigenvalues().cwiseMax(0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr(
        ar1_correlation(periods, rho));
    if (esr.info() != Eigen::Success)
      throw NumericalError("temporal eigendecomposition failed");
    p_ = esr.eigenvectors();
    d_ = lam * esr.eigenvalues().transpose();  // n x T outer product
    d_.array() += tau_sq;
    logdet_ = d_.array().log().sum();
  }
  long size() const override { return static_cast<long>(n_) * T_; }
  double logdet() const override { return logdet_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    Eigen::Map<const Eigen::MatrixXd> v(rhs.data(), n_, T_);
    Eigen::MatrixXd w = q_.transpose() * v * p_;
    w.array() /= d_.array();
    Eigen::MatrixXd out = q_ * w * p_.transpose();
    return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
  }

 private:
  int n_, T_;
  Eigen::MatrixXd q_, p_, d_;
  double logdet_ = 0.0;
};

// Fully assembled dense covariance; the fallback for spatially varying
// slopes where the Hadamard structure breaks the Kronecker shortcuts.
class DenseOp final : public CovOperator {
 public:
  DenseOp(const ModelSpec& model, const ParamVector& params,
          const TrainingData& data) {
    const long N = data.nobs();
    const Eigen::MatrixXd r = temporal_correlation(
        effective_temporal(model, params), data.y.periods);
    Eigen::MatrixXd sigma = kron(r, cov_matrix(data.y.points, params.theta0));
    if (model.varying_slopes) {
      const Eigen::MatrixXd st1 =
          kron(r, cov_matrix(data.y.points, *params.theta1));
      for (int j = 0; j < model.q; ++j)
        sigma += hadamard_rank1(st1, data.covariate_vec(j));
    }
    sigma.diagonal().array() += params.tau_sq;
    auto res = chol_with_jitter(std::move(sigma));
    llt_ = std::move(res.llt);
    jitter_ = res.jitter;
    logdet_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    n_ = N;
  }
  long size() const override { return n_; }
  double logdet() const override { return logdet_; }
  double jitter() const override { return jitter_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    return llt_.solve(rhs);
  }

 private:
  long n_ = 0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
  double logdet_ = 0.0;
};

// Tapered covariance: sparse assembly plus simplicial LDLT.  When periods
// are iid and slopes are non-varying the T identical diagonal blocks share
// one factorization.
class SparseTaperedOp final : public CovOperator {
 public:
  SparseTaperedOp(const ModelSpec& model, const ParamVector& params,
                  const TrainingData& data, double taper_range) {
    const int n = data.n();
    T_ = data.T();
    n_ = n;
    const TaperSpec taper{taper_range};
    const Eigen::SparseMatrix<double> s0 =
        cov_tapered(data.y.points, params.theta0, taper);
    block_mode_ = model.temporal.kind == TemporalKind::iid &&
                  !model.varying_slopes;
    if (block_mode_) {
      Eigen::SparseMatrix<double> a = s0;
      add_diagonal(a, params.tau_sq);
      factor(a, mean_diag(a));
      return;
    }
    // global nT x nT assembly
    const Eigen::MatrixXd r = temporal_correlation(
        effective_temporal(model, params), data.y.periods);
    Eigen::SparseMatrix<double> s1;
    std::vector<Eigen::VectorXd> xs;
    if (model.varying_slopes) {
      s1 = cov_tapered(data.y.points, *params.theta1, taper);
      for (int j = 0; j < model.q; ++j) xs.push_back(data.covariate_vec(j));
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(s0.nonZeros()) * T_ * T_);
    for (int t = 0; t < T_; ++t) {
      for (int s = 0; s < T_; ++s) {
        const double rts = r(t, s);
        if (rts == 0.0) continue;
        for (int k = 0; k < s0.outerSize(); ++k) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(s0, k); it;
               ++it) {
            trips.emplace_back(t * n + static_cast<int>(it.row()),
                               s * n + static_cast<int>(it.col()),
                               rts * it.value());
          }
        }
        if (model.varying_slopes) {
          for (int k = 0; k < s1.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(s1, k); it;
                 ++it) {
              const long row = t * n + it.row();
              const long col = s * n + it.col();
              double v = 0.0;
              for (std::size_t j = 0; j < xs.size(); ++j)
                v += xs[j](row) * xs[j](col);
              trips.emplace_back(static_cast<int>(row), static_cast<int>(col),
                                 rts * it.value() * v);
            }
          }
        }
      }
    }
    const long N = static_cast<long>(n) * T_;
    Eigen::SparseMatrix<double> a(N, N);
    a.setFromTriplets(trips.begin(), trips.end());
    add_diagonal(a, params.tau_sq);
    factor(a, mean_diag(a));
  }

  long size() const override { return static_cast<long>(n_) * T_; }
  double logdet() const override {
    return block_mode_ ? T_ * block_logdet_ : block_logdet_;
  }
  double jitter() const override { return jitter_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    if (!block_mode_) return ldlt_.solve(rhs);
    Eigen::VectorXd out(rhs.size());
    for (int t = 0; t < T_; ++t)
      out.segment(static_cast<long>(t) * n_, n_) =
          ldlt_.solve(rhs.segment(static_cast<long>(t) * n_, n_));
    return out;
  }

 private:
  static void add_diagonal(Eigen::SparseMatrix<double>& a, double v) {
    for (int i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += v;
  }
  static double mean_diag(const Eigen::SparseMatrix<double>& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += a.coeff(i, i);
    return s / a.rows();
  }
  void factor(Eigen::SparseMatrix<double>& a, double base) {
    if (base <= 0.0) base = 1.0;
    a.makeCompressed();
    double prev = 0.0;
    for (double f = 0.0; f <= 1.000001e-6;
         f = (f == 0.0 ? 1e-10 : f * 10.0)) {
      const double jit = f * base;
      if (jit != prev) add_diagonal(a, jit - prev);
      prev = jit;
      ldlt_.compute(a);
      if (ldlt_.info() == Eigen::Success &&
          (ldlt_.vectorD().array() > 0.0).all()) {
        jitter_ = jit;
        block_logdet_ = ldlt_.vectorD().array().log().sum();
        return;
      }
    }
    throw NumericalError("sparse factorization failed after maximal jitter");
  }

  int n_ = 0, T_ = 1;
  bool block_mode_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  double jitter_ = 0.0;
  double block_logdet_ = 0.0;
};

}  // namespace

Eigen::MatrixXd CovOperator::solve_matrix(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd out(rhs.rows(), rhs.cols());
  for (int j = 0; j < rhs.cols(); ++j) out.col(j) = solve(rhs.col(j));
  return out;
}

std::unique_ptr<CovOperator> make_cov_operator(const ModelSpec& model,
                                               const ParamVector& params,
                                               const TrainingData& data,
                                               const Backend& backend) {
  check_params(model, params, data);
  if (model.kind == ModelKind::m0)
    return std::make_unique<NuggetOp>(data.nobs(), params.tau_sq);
  if (backend.kind == Backend::Kind::tapered) {
    if (!(backend.taper_range > 0.0))
      throw ConfigError("tapered backend requires a positive taper range");
    return std::make_unique<SparseTaperedOp>(model, params, data,
                                             backend.taper_range);
  }
  if (model.varying_slopes)
    return std::make_unique<DenseOp>(model, params, data);
  if (model.temporal.kind == TemporalKind::ar1)
    return std::make_unique<KroneckerAr1Op>(data.y.points, params.theta0,
                                            params.tau_sq, *params.rho_ar,
                                            data.y.periods);
  return std::make_unique<IidBlockOp>(data.y.points, params.theta0,
                                      params.tau_sq, data.T());
}

double gaussian_loglik(const CovOperator& op, const Eigen::VectorXd& resid) {
  if (resid.size() != op.size())
    throw DomainError("gaussian_loglik: dimension mismatch");
  const double quad = resid.dot(op.solve(resid));
  return -0.5 * (resid.size() * kLog2Pi + op.logdet() + quad);
}

namespace {
Eigen::VectorXd mean_vector(const ParamVector& params,
                            const TrainingData& data) {
  Eigen::VectorXd mu =
      Eigen::VectorXd::Constant(data.nobs(), params.beta0);
  for (int j = 0; j < data.q(); ++j) {
    if (params.beta1.size() <= j)
      throw DomainError("likelihood: beta1 shorter than covariate count");
    mu += params.beta1(j) * data.covariate_vec(j);
  }
  return mu;
}
}  // namespace

double loglik_exact(const ModelSpec& model, const ParamVector& params,
                    const TrainingData& data) {
  auto op = make_cov_operator(model, params, data, Backend::exact());
  return gaussian_loglik(*op, data.y.vec() - mean_vector(params, data));
}

double loglik_tapered(const ModelSpec& model, const ParamVector& params,
                      const TaperSpec& taper, const TrainingData& data) {
  auto op =
      make_cov_operator(model, params, data, Backend::tapered(taper.taper_range));
  return gaussian_loglik(*op, data.y.vec() - mean_vector(params, data));
}

GlsResult gls(const CovOperator& op, const Eigen::MatrixXd& F,
              const Eigen::VectorXd& y) {
  const Eigen::MatrixXd sf = op.solve_matrix(F);
  GlsResult res;
  res.normal = F.transpose() * sf;
  const Eigen::VectorXd b = sf.transpose() * y;
  res.delta = res.normal.ldlt().solve(b);
  return res;
}

ProfiledLoglik loglik_profiled(const ModelSpec& model,
                               const ParamVector& params,
                               const TrainingData& data,
                               const Backend& backend) {
  auto op = make_cov_operator(model, params, data, backend);
  const Eigen::MatrixXd F = data.design_matrix();
  const Eigen::VectorXd y = data.y.vec();
  const GlsResult g = gls(*op, F, y);
  ProfiledLoglik out;
  out.beta0 = g.delta(0);
  out.beta1 = g.delta.tail(g.delta.size() - 1);
  out.jitter = op->jitter();
  out.loglik = gaussian_loglik(*op, y - F * g.delta);
  return out;
}

}  // namespace svcgp
