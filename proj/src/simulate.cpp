#include "svcgp/simulate.hpp"

#include <cmath>

#include "svcgp/errors.hpp"
#include "svcgp/rng.hpp"

namespace svcgp {

namespace {

Eigen::MatrixXd standard_normal(int n, int T, Rng& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(n, T);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < n; ++k) m(k, t) = z(rng);
  return m;
}

std::vector<long long> default_periods(int T) {
  std::vector<long long> p(T);
  for (int t = 0; t < T; ++t) p[t] = t + 1;
  return p;
}

}  // namespace

SpaceTimeField sample_gp(const Eigen::MatrixX2d& pts, const KernelParams& kp,
                         const TemporalStructure& temporal, int T,
                         std::uint64_t seed) {
  if (T < 1) throw DomainError("sample_gp: T must be >= 1");
  const int n = static_cast<int>(pts.rows());
  Rng rng(seed);
  const auto chol = chol_with_jitter(cov_matrix(pts, kp));
  const Eigen::MatrixXd l = chol.llt.matrixL();
  SpaceTimeField f;
  f.points = pts;
  f.periods = default_periods(T);
  f.values.resize(n, T);
  const Eigen::MatrixXd z = standard_normal(n, T, rng);
  if (temporal.kind == TemporalKind::iid) {
    f.values = l * z;
    return f;
  }
  const double rho = temporal.rho_ar;
  if (!(std::abs(rho) < 1.0)) throw DomainError("sample_gp: |rho| must be < 1");
  const double scale = std::sqrt(1.0 - rho * rho);
  f.values.col(0) = l * z.col(0);
  for (int t = 1; t < T; ++t)
    f.values.col(t) = rho * f.values.col(t - 1) + scale * (l * z.col(t));
  return f;
}

std::vector<Eigen::MatrixXd> simulate_covariates(int n, int T, int q,
                                                 std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> x;
  for (int j = 0; j < q; ++j) {
    Rng rng = make_rng(seed, Stream::covariate, j);
    x.push_back(standard_normal(n, T, rng));
  }
  return x;
}

SpaceTimeField simulate_global(const Eigen::MatrixX2d& coarse_pts,
                               const GlobalParams& gp,
                               const std::vector<Eigen::MatrixXd>& x, int T,
                               std::uint64_t seed) {
  const int n = static_cast<int>(coarse_pts.rows());
  if (static_cast<int>(x.size()) != gp.beta.size())
    throw DataError("simulate_global: covariate count != beta length");
  if (!(gp.zeta_sq > 0.0))
    throw DomainError("simulate_global: zeta_sq must be > 0");
  Rng rng = make_rng(seed, Stream::residual);
  SpaceTimeField f;
  f.points = coarse_pts;
  f.periods = default_periods(T);
  f.values = std::sqrt(gp.zeta_sq) * standard_normal(n, T, rng);
  f.values.array() += gp.alpha;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j].rows() != n || x[j].cols() != T)
      throw DataError("simulate_global: covariate shape mismatch");
    f.values += gp.beta(static_cast<int>(j)) * x[j];
  }
  return f;
}

RegionalSim simulate_regional(const GridPair& pair, const GlobalParams& gp,
                              const RegionalParams& rp,
                              const std::vector<Eigen::MatrixXd>& x_coarse,
                              int T, std::uint64_t seed) {
  const int nw = pair.fine.size();
  const int ns = pair.coarse.size();
  const int q = static_cast<int>(x_coarse.size());
  if (gp.beta.size() != q || rp.beta1.size() != q)
    throw DataError("simulate_regional: covariate count mismatch");
  if (!(rp.tau_sq > 0.0))
    throw DomainError("simulate_regional: tau_sq must be > 0");

  RegionalSim sim;
  sim.c_coarse = simulate_global(pair.coarse.points(), gp, x_coarse, T, seed);
  sim.parts.eps = sim.c_coarse.values;  // recover eps below
  for (int j = 0; j < q; ++j)
    sim.parts.eps -= gp.beta(j) * x_coarse[static_cast<std::size_t>(j)];
  sim.parts.eps.array() -= gp.alpha;

  sim.parts.alpha_r = sample_gp(pair.fine.points(), rp.theta0, rp.temporal, T,
                                derive_seed(seed, Stream::intercept))
                          .values;
  sim.parts.alpha_r.array() += rp.beta0;
  for (int j = 0; j < q; ++j) {
    if (rp.theta1) {
      Eigen::MatrixXd b =
          sample_gp(pair.fine.points(), *rp.theta1, rp.temporal, T,
                    derive_seed(seed, Stream::slope, j))
              .values;
      b.array() += rp.beta1(j);
      sim.parts.beta_r.push_back(std::move(b));
    } else {
      sim.parts.beta_r.push_back(
          Eigen::MatrixXd::Constant(nw, T, rp.beta1(j)));
    }
  }
  {
    Rng rng = make_rng(seed, Stream::noise);
    sim.parts.gamma = std::sqrt(rp.tau_sq) * standard_normal(nw, T, rng);
  }

  for (int j = 0; j < q; ++j) {
    Eigen::MatrixXd xf(nw, T);
    for (int k = 0; k < nw; ++k)
      xf.row(k) = x_coarse[static_cast<std::size_t>(j)].row(
          pair.fine_to_coarse[static_cast<std::size_t>(k)]);
    sim.x_fine.push_back(std::move(xf));
  }

  sim.c_fine.points = pair.fine.points();
  sim.c_fine.periods = default_periods(T);
  sim.c_fine.values = Eigen::MatrixXd::Zero(nw, T);
  for (int k = 0; k < nw; ++k) {
    const int s = pair.fine_to_coarse[static_cast<std::size_t>(k)];
    for (int t = 0; t < T; ++t) {
      double v = gp.alpha + sim.parts.alpha_r(k, t) +
                 sim.parts.eps(s, t) + sim.parts.gamma(k, t);
      for (int j = 0; j < q; ++j)
        v += (gp.beta(j) + sim.parts.beta_r[static_cast<std::size_t>(j)](k, t)) *
             sim.x_fine[static_cast<std::size_t>(j)](k, t);
      sim.c_fine.values(k, t) = v;
    }
  }
  (void)ns;
  sim.y = make_response(sim.c_fine, sim.c_coarse, pair.fine_to_coarse);
  return sim;
}

SpaceTimeField make_response(const SpaceTimeField& c_fine,
                             const SpaceTimeField& c_coarse,
                             const std::vector<int>& fine_to_coarse) {
  if (c_fine.T() != c_coarse.T())
    throw DataError("make_response: period count mismatch");
  if (c_fine.periods != c_coarse.periods)
    throw DataError("make_response: period labels mismatch");
  if (static_cast<int>(fine_to_coarse.size()) != c_fine.n())
    throw DataError("make_response: map size mismatch");
  SpaceTimeField y;
  y.points = c_fine.points;
  y.periods = c_fine.periods;
  y.values.resize(c_fine.n(), c_fine.T());
  for (int k = 0; k < c_fine.n(); ++k) {
    const int s = fine_to_coarse[static_cast<std::size_t>(k)];
    if (s < 0 || s >= c_coarse.n())
      throw DataError("make_response: map index out of range");
    y.values.row(k) = c_fine.values.row(k) - c_coarse.values.row(s);
  }
  return y;
}

}  // namespace svcgp
