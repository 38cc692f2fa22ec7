#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <vector>

namespace svcgp {

enum class KernelFamily { exponential, matern };

// Isotropic covariance kernel: range is the distance scale of the argument
// d / range, sd the marginal standard deviation, nu the Matern smoothness
// (ignored by the exponential family, which equals Matern with nu = 1/2):
//   C(d) = sd^2 * 2^(1-nu)/Gamma(nu) * (d/range)^nu * K_nu(d/range).
struct KernelParams {
  KernelFamily family = KernelFamily::exponential;
  double range = 1.0;
  double sd = 1.0;
  double nu = 0.5;
};

inline KernelParams exponential_kernel(double range, double sd) {
  return {KernelFamily::exponential, range, sd, 0.5};
}
inline KernelParams matern_kernel(double range, double sd, double nu) {
  return {KernelFamily::matern, range, sd, nu};
}

// Covariance between two points at distance d >= 0.
double kernel_eval(const KernelParams& p, double d);

// Wendland taper weight: (1 - d/r)^4_+ (1 + 4 d/r).  Compactly supported
// on [0, r], equal to 1 at d = 0, nonincreasing and continuous.
double wendland1(double d, double taper_range);

struct TaperSpec {
  double taper_range = 1.0;  // support radius; entries vanish at and beyond it
};

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixX2d& pts);
Eigen::MatrixXd cross_distances(const Eigen::MatrixX2d& a,
                                const Eigen::MatrixX2d& b);

// Dense n x n covariance of one process over a point set.
Eigen::MatrixXd cov_matrix(const Eigen::MatrixX2d& pts, const KernelParams& p);
// Dense cross-covariance between two point sets (rows of a x rows of b).
Eigen::MatrixXd cross_covariance(const Eigen::MatrixX2d& a,
                                 const Eigen::MatrixX2d& b,
                                 const KernelParams& p);

// Sparse covariance with the Wendland taper applied entrywise.  Only pairs
// within the taper range are visited (grid-binned neighbor search), so the
// cost is proportional to the number of retained entries.
Eigen::SparseMatrix<double> cov_tapered(const Eigen::MatrixX2d& pts,
                                        const KernelParams& p,
                                        const TaperSpec& taper);

// Temporal dependence of the coefficient processes across periods.
enum class TemporalKind { iid, ar1 };
struct TemporalStructure {
  TemporalKind kind = TemporalKind::iid;
  double rho_ar = 0.0;  // used when kind == ar1; |rho_ar| < 1
};

// T x T temporal correlation factor: identity for iid, else the AR(1)
// correlation matrix with entry (t, s) = rho^|t-s| (unit diagonal; the
// spatial kernel alone carries the marginal variance).
Eigen::MatrixXd temporal_correlation(const TemporalStructure& ts, int T);
Eigen::MatrixXd ar1_correlation(int T, double rho);

// Label-aware variant: entry (i, j) couples periods[i] and periods[j], so an
// ar1 panel with missing periods decays with the label gap rather than the
// column index.  Coincides with the index form for consecutive labels.
Eigen::MatrixXd temporal_correlation(const TemporalStructure& ts,
                                     const std::vector<long long>& periods);
Eigen::MatrixXd ar1_correlation(const std::vector<long long>& periods,
                                double rho);

// Separable space-time covariance R_T (x) Sigma_spatial, dimension nT;
// observation index t*n + k (period-major blocks).
Eigen::MatrixXd spacetime_cov(const Eigen::MatrixXd& spatial,
                              const TemporalStructure& ts, int T);

// Entrywise product with the rank-one matrix x x^T: out_kl = cov_kl x_k x_l.
Eigen::MatrixXd hadamard_rank1(const Eigen::MatrixXd& cov,
                               const Eigen::VectorXd& x);
Eigen::SparseMatrix<double> hadamard_rank1(const Eigen::SparseMatrix<double>& cov,
                                           const Eigen::VectorXd& x);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Cholesky with an escalating diagonal jitter fallback.  Factors A as-is
// when possible; otherwise adds jitter = f * mean(diag(A)) for
// f in {1e-10, 1e-9, ..., 1e-6} and keeps the first factor that succeeds.
// Throws NumericalError if the largest jitter still fails.
struct CholeskyResult {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal
};
CholeskyResult chol_with_jitter(Eigen::MatrixXd a);

}  // namespace svcgp
