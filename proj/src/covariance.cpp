#include "svcgp/covariance.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "svcgp/errors.hpp"

namespace svcgp {

double kernel_eval(const KernelParams& p, double d) {
  if (d < 0.0) throw DomainError("kernel_eval: negative distance");
  if (!(p.range > 0.0)) throw DomainError("kernel_eval: range must be > 0");
  if (p.sd < 0.0) throw DomainError("kernel_eval: sd must be >= 0");
  const double s2 = p.sd * p.sd;
  const double u = d / p.range;
  if (u > 705.0) return 0.0;  // Bessel tail underflows; short-circuit
  if (p.family == KernelFamily::exponential) return s2 * std::exp(-u);
  if (!(p.nu > 0.0)) throw DomainError("kernel_eval: nu must be > 0");
  if (u < 1e-12) return s2;  // limit of u^nu K_nu(u) as u -> 0
  if (p.nu == 0.5) return s2 * std::exp(-u);
  const double c = std::pow(2.0, 1.0 - p.nu) / boost::math::tgamma(p.nu);
  return s2 * c * std::pow(u, p.nu) * boost::math::cyl_bessel_k(p.nu, u);
}

double wendland1(double d, double taper_range) {
  if (d < 0.0) throw DomainError("wendland1: negative distance");
  if (!(taper_range > 0.0))
    throw DomainError("wendland1: taper range must be > 0");
  const double u = d / taper_range;
  if (u >= 1.0) return 0.0;
  const double om = 1.0 - u;
  const double om2 = om * om;
  return om2 * om2 * (1.0 + 4.0 * u);
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixX2d& pts) {
  const int n = static_cast<int>(pts.rows());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = (pts.row(i) - pts.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd cross_distances(const Eigen::MatrixX2d& a,
                                const Eigen::MatrixX2d& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j)
      d(i, j) = (a.row(i) - b.row(j)).norm();
  return d;
}

Eigen::MatrixXd cov_matrix(const Eigen::MatrixX2d& pts,
                           const KernelParams& p) {
  const int n = static_cast<int>(pts.rows());
  if (n == 0) throw DomainError("cov_matrix: empty point set");
  Eigen::MatrixXd c(n, n);
  const double s2 = p.sd * p.sd;
  for (int i = 0; i < n; ++i) {
    c(i, i) = s2;
    for (int j = i + 1; j < n; ++j) {
      const double v = kernel_eval(p, (pts.row(i) - pts.row(j)).norm());
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Eigen::MatrixXd cross_covariance(const Eigen::MatrixX2d& a,
                                 const Eigen::MatrixX2d& b,
                                 const KernelParams& p) {
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j)
      c(i, j) = kernel_eval(p, (a.row(i) - b.row(j)).norm());
  return c;
}

namespace {
// Key for a square bin of side taper_range.
struct CellKey {
  long long x, y;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y; }
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL);
  }
};
}  // namespace

Eigen::SparseMatrix<double> cov_tapered(const Eigen::MatrixX2d& pts,
                                        const KernelParams& p,
                                        const TaperSpec& taper) {
  const double r = taper.taper_range;
  if (!(r > 0.0)) throw DomainError("cov_tapered: taper range must be > 0");
  const int n = static_cast<int>(pts.rows());
  std::unordered_map<CellKey, std::vector<int>, CellHash> bins;
  bins.reserve(static_cast<std::size_t>(n));
  auto key_of = [&](int i) {
    return CellKey{static_cast<long long>(std::floor(pts(i, 0) / r)),
                   static_cast<long long>(std::floor(pts(i, 1) / r))};
  };
  for (int i = 0; i < n; ++i) bins[key_of(i)].push_back(i);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 16);
  const double s2 = p.sd * p.sd;
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, s2);
    const CellKey k = key_of(i);
    for (long long cx = k.x - 1; cx <= k.x + 1; ++cx) {
      for (long long cy = k.y - 1; cy <= k.y + 1; ++cy) {
        auto it = bins.find(CellKey{cx, cy});
        if (it == bins.end()) continue;
        for (int j : it->second) {
          if (j <= i) continue;  // visit each pair once, mirror below
          const double d = (pts.row(i) - pts.row(j)).norm();
          if (d >= r) continue;
          const double v = kernel_eval(p, d) * wendland1(d, r);
          trips.emplace_back(i, j, v);
          trips.emplace_back(j, i, v);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::MatrixXd ar1_correlation(int T, double rho) {
  if (T < 1) throw DomainError("ar1_correlation: T must be >= 1");
  if (!(std::abs(rho) < 1.0))
    throw DomainError("ar1_correlation: |rho| must be < 1");
  Eigen::MatrixXd r(T, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s) r(t, s) = std::pow(rho, std::abs(t - s));
  return r;
}

Eigen::MatrixXd temporal_correlation(const TemporalStructure& ts, int T) {
  if (T < 1) throw DomainError("temporal_correlation: T must be >= 1");
  if (ts.kind == TemporalKind::iid)
    return Eigen::MatrixXd::Identity(T, T);
  return ar1_correlation(T, ts.rho_ar);
}

Eigen::MatrixXd ar1_correlation(const std::vector<long long>& periods,
                                double rho) {
  const int T = static_cast<int>(periods.size());
  if (T < 1) throw DomainError("ar1_correlation: need at least one period");
  if (!(std::abs(rho) < 1.0))
    throw DomainError("ar1_correlation: |rho| must be < 1");
  Eigen::MatrixXd r(T, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s) {
      const long long gap = periods[static_cast<std::size_t>(t)] -
                            periods[static_cast<std::size_t>(s)];
      r(t, s) = std::pow(rho, static_cast<double>(gap < 0 ? -gap : gap));
    }
  return r;
}

Eigen::MatrixXd temporal_correlation(const TemporalStructure& ts,
                                     const std::vector<long long>& periods) {
  const int T = static_cast<int>(periods.size());
  if (T < 1) throw DomainError("temporal_correlation: need at least one period");
  if (ts.kind == TemporalKind::iid)
    return Eigen::MatrixXd::Identity(T, T);
  return ar1_correlation(periods, ts.rho_ar);
}

Eigen::MatrixXd spacetime_cov(const Eigen::MatrixXd& spatial,
                              const TemporalStructure& ts, int T) {
  return kron(temporal_correlation(ts, T), spatial);
}

Eigen::MatrixXd hadamard_rank1(const Eigen::MatrixXd& cov,
                               const Eigen::VectorXd& x) {
  if (cov.rows() != x.size() || cov.cols() != x.size())
    throw DomainError("hadamard_rank1: dimension mismatch");
  return cov.cwiseProduct(x * x.transpose());
}

Eigen::SparseMatrix<double> hadamard_rank1(
    const Eigen::SparseMatrix<double>& cov, const Eigen::VectorXd& x) {
  if (cov.rows() != x.size() || cov.cols() != x.size())
    throw DomainError("hadamard_rank1: dimension mismatch");
  Eigen::SparseMatrix<double> out = cov;
  for (int k = 0; k < out.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(out, k); it; ++it)
      it.valueRef() *= x(it.row()) * x(it.col());
  return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CholeskyResult chol_with_jitter(Eigen::MatrixXd a) {
  CholeskyResult res;
  res.llt.compute(a);
  if (res.llt.info() == Eigen::Success) return res;
  const double mean_diag = a.diagonal().mean();
  const double base = mean_diag > 0.0 ? mean_diag : 1.0;
  double prev = 0.0;
  for (double f = 1e-10; f <= 1.000001e-6; f *= 10.0) {
    const double jit = f * base;
    a.diagonal().array() += jit - prev;
    prev = jit;
    res.llt.compute(a);
    if (res.llt.info() == Eigen::Success) {
      res.jitter = jit;
      return res;
    }
  }
  throw NumericalError("Cholesky failed after maximal jitter " +
                       std::to_string(prev));
}

}  // namespace svcgp
