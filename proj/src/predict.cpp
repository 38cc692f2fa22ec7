#include "svcgp/predict.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <unordered_map>

#include "svcgp/errors.hpp"
#include "svcgp/grid.hpp"
#include "svcgp/likelihood.hpp"
#include "svcgp/rng.hpp"
#include "svcgp/stats.hpp"

namespace svcgp {

namespace {

Eigen::VectorXd training_mean(const ParamVector& p, const TrainingData& d) {
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(d.nobs(), p.beta0);
  for (int j = 0; j < d.q(); ++j) mu += p.beta1(j) * d.covariate_vec(j);
  return mu;
}

double temporal_weight(const TemporalStructure& ts, long long a, long long b) {
  if (ts.kind == TemporalKind::iid) return a == b ? 1.0 : 0.0;
  if (a == b) return 1.0;
  return std::pow(ts.rho_ar, static_cast<double>(std::llabs(a - b)));
}

TrainingData subset_periods(const TrainingData& d, const std::vector<int>& cols) {
  TrainingData out;
  out.y = select_periods(d.y, cols);
  for (const auto& xj : d.x) {
    Eigen::MatrixXd sub(xj.rows(), static_cast<long>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
      sub.col(static_cast<long>(i)) = xj.col(cols[i]);
    out.x.push_back(std::move(sub));
  }
  return out;
}

struct PtKey {
  std::uint64_t a = 0, b = 0;
  bool operator==(const PtKey&) const = default;
};
struct PtHash {
  std::size_t operator()(const PtKey& k) const {
    return static_cast<std::size_t>(k.a * 0x9E3779B97F4A7C15ull ^ k.b);
  }
};

}  // namespace

ConditionalMoments conditional_moments(const ModelSpec& model,
                                       const ParamVector& p,
                                       const TrainingData& data,
                                       const PredictionTargets& targets,
                                       bool exclude_same_period) {
  const int m = targets.m();
  if (static_cast<int>(targets.periods.size()) != m)
    throw DataError("conditional_moments: periods/points size mismatch");
  const int q = data.q();
  if (q > 0 &&
      (targets.covariates.rows() != m || targets.covariates.cols() != q))
    throw DataError("conditional_moments: covariate block must be m x q");
  if (model.varying_slopes && !p.theta1)
    throw ConfigError("conditional_moments: varying slopes need theta1");

  TemporalStructure temporal = model.temporal;
  if (temporal.kind == TemporalKind::ar1) {
    if (!p.rho_ar) throw DomainError("conditional_moments: ar1 requires rho_ar");
    if (!(std::abs(*p.rho_ar) < 1.0))
      throw DomainError("conditional_moments: |rho_ar| must be < 1");
    temporal.rho_ar = *p.rho_ar;
  }

  ConditionalMoments out;
  out.mean.resize(m);
  out.var.resize(m);

  // marginal law first; conditioning on correlated observations refines it
  const double sd0_sq = model.has_spatial() ? p.theta0.sd * p.theta0.sd : 0.0;
  for (int i = 0; i < m; ++i) {
    double mu = p.beta0;
    double v = p.tau_sq + sd0_sq;
    for (int j = 0; j < q; ++j) {
      const double xij = targets.covariates(i, j);
      mu += p.beta1(j) * xij;
      if (model.varying_slopes)
        v += p.theta1->sd * p.theta1->sd * xij * xij;
    }
    out.mean(i) = mu;
    out.var(i) = v;
  }
  if (!model.has_spatial() || data.nobs() == 0) return out;

  // conditioning sets: the full data, or (per excluded period) the data with
  // that period's column removed
  constexpr long long kNone = std::numeric_limits<long long>::min();
  std::map<long long, std::vector<int>> groups;
  for (int i = 0; i < m; ++i) {
    long long key = kNone;
    if (exclude_same_period) {
      const auto& per = data.y.periods;
      if (std::find(per.begin(), per.end(), targets.periods[i]) != per.end())
        key = targets.periods[i];
    }
    groups[key].push_back(i);
  }

  auto process = [&](const TrainingData& cond, const std::vector<int>& idx,
                     bool allow_nugget_share) {
    const int n = cond.n();
    const int T = cond.T();
    std::unique_ptr<CovOperator> op;
    Eigen::VectorXd z;
    auto ensure = [&]() {
      if (op) return;
      op = make_cov_operator(model, p, cond, Backend::exact());
      z = op->solve(cond.y.vec() - training_mean(p, cond));
    };

    // spatial cross-columns memoized per target point; targets typically
    // repeat one point set over many periods
    std::unordered_map<PtKey, int, PtHash> memo;
    std::vector<Eigen::VectorXd> s0_cache, s1_cache;

    Eigen::VectorXd u(T);
    Eigen::VectorXd c(static_cast<long>(n) * T);
    for (int i : idx) {
      bool any = false;
      for (int t = 0; t < T; ++t) {
        u(t) = temporal_weight(temporal, targets.periods[i],
                               cond.y.periods[t]);
        if (u(t) != 0.0) any = true;
      }
      if (!any) continue;  // uncorrelated: the marginal law already stored
      ensure();

      const double tx = targets.points(i, 0), ty = targets.points(i, 1);
      const PtKey key{std::bit_cast<std::uint64_t>(tx),
                      std::bit_cast<std::uint64_t>(ty)};
      auto ins = memo.emplace(key, static_cast<int>(s0_cache.size()));
      if (ins.second) {
        Eigen::VectorXd s0(n), s1;
        if (model.varying_slopes) s1.resize(n);
        for (int k = 0; k < n; ++k) {
          const double d = std::hypot(tx - cond.y.points(k, 0),
                                      ty - cond.y.points(k, 1));
          s0(k) = kernel_eval(p.theta0, d);
          if (model.varying_slopes) s1(k) = kernel_eval(*p.theta1, d);
        }
        s0_cache.push_back(std::move(s0));
        s1_cache.push_back(std::move(s1));
      }
      const Eigen::VectorXd& s0 = s0_cache[static_cast<std::size_t>(ins.first->second)];
      const Eigen::VectorXd& s1 = s1_cache[static_cast<std::size_t>(ins.first->second)];

      for (int t = 0; t < T; ++t) {
        const long base = static_cast<long>(t) * n;
        if (u(t) == 0.0) {
          c.segment(base, n).setZero();
          continue;
        }
        for (int k = 0; k < n; ++k) {
          double v = s0(k);
          if (model.varying_slopes) {
            double sx = 0.0;
            for (int j = 0; j < q; ++j)
              sx += targets.covariates(i, j) * cond.x[static_cast<std::size_t>(j)](k, t);
            v += s1(k) * sx;
          }
          c(base + k) = u(t) * v;
        }
        // a target that IS a training observation shares its noise term,
        // which makes the conditional reproduce the observed value exactly
        if (allow_nugget_share && targets.periods[i] == cond.y.periods[t]) {
          for (int k = 0; k < n; ++k)
            if (cond.y.points(k, 0) == tx && cond.y.points(k, 1) == ty)
              c(base + k) += p.tau_sq;
        }
      }
      out.mean(i) += c.dot(z);
      out.var(i) = std::max(out.var(i) - c.dot(op->solve(c)), 0.0);
    }
  };

  for (const auto& [excl, idx] : groups) {
    if (excl == kNone) {
      process(data, idx, !exclude_same_period);
    } else {
      std::vector<int> cols;
      for (int t = 0; t < data.T(); ++t)
        if (data.y.periods[static_cast<std::size_t>(t)] != excl)
          cols.push_back(t);
      if (cols.empty()) continue;  // nothing left to condition on
      process(subset_periods(data, cols), idx, false);
    }
  }
  return out;
}

PredictionResult predict_response(const FitResult& fit, const TrainingData& data,
                                  const PredictionTargets& targets,
                                  const PredictOptions& opts) {
  if (!(opts.level > 0.0 && opts.level < 1.0))
    throw ConfigError("predict_response: level must be in (0,1)");
  ConditionalMoments cm =
      conditional_moments(fit.model, fit.estimates, data, targets,
                          opts.exclude_same_period);
  // white-noise-only model: fold in the closed-form mean-estimation variance
  if (fit.model.kind == ModelKind::m0 && data.nobs() > 0)
    cm.var.array() += fit.estimates.tau_sq / static_cast<double>(data.nobs());

  PredictionResult res;
  res.periods = targets.periods;
  res.points = targets.points;
  res.level = opts.level;
  res.mean = cm.mean;
  const double zq = normal_quantile(0.5 + opts.level / 2.0);
  const Eigen::VectorXd sd = cm.var.array().sqrt();
  res.lower = cm.mean - zq * sd;
  res.upper = cm.mean + zq * sd;
  return res;
}

PredictionResult predict_response(const PosteriorDraws& draws,
                                  const TrainingData& data,
                                  const PredictionTargets& targets,
                                  const McmcPredictOptions& opts) {
  const int avail = static_cast<int>(draws.draws.rows());
  if (avail < 2) throw DiagnosticsError("predict_response: posterior sample too small");
  if (opts.n_draws < 2)
    throw ConfigError("predict_response: need at least 2 mixture draws");
  if (!(opts.base.level > 0.0 && opts.base.level < 1.0))
    throw ConfigError("predict_response: level must be in (0,1)");

  const int M = std::min(opts.n_draws, avail);
  const int m = targets.m();
  Eigen::MatrixXd samples(m, M);
  Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(m);
  Rng rng = make_rng(opts.seed, Stream::misc);
  std::normal_distribution<double> normal;
  for (int k = 0; k < M; ++k) {
    // evenly thinned, last draw included
    const int idx =
        static_cast<int>((static_cast<long>(k + 1) * avail) / M) - 1;
    const ParamVector p = draws.param_at(idx);
    const ConditionalMoments cm = conditional_moments(
        draws.model, p, data, targets, opts.base.exclude_same_period);
    mean_acc += cm.mean;
    for (int i = 0; i < m; ++i)
      samples(i, k) = cm.mean(i) + std::sqrt(cm.var(i)) * normal(rng);
  }

  PredictionResult res;
  res.periods = targets.periods;
  res.points = targets.points;
  res.level = opts.base.level;
  res.mean = mean_acc / static_cast<double>(M);
  res.lower.resize(m);
  res.upper.resize(m);
  const double lo = (1.0 - opts.base.level) / 2.0;
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd row = samples.row(i).transpose();
    res.lower(i) = quantile(row, lo);
    res.upper(i) = quantile(row, 1.0 - lo);
  }
  return res;
}

PredictionResult add_offset(const PredictionResult& pred,
                            const Eigen::VectorXd& offset) {
  if (offset.size() != pred.mean.size())
    throw DataError("add_offset: offset length must match prediction rows");
  PredictionResult out = pred;
  out.mean += offset;
  out.lower += offset;
  out.upper += offset;
  return out;
}

PredictionResult back_transform(const PredictionResult& pred) {
  if (pred.scale == PredictionScale::physical)
    throw DomainError("back_transform: prediction already on the physical scale");
  PredictionResult out = pred;
  out.mean = pred.mean.array().exp();
  out.lower = pred.lower.array().exp();
  out.upper = pred.upper.array().exp();
  out.scale = PredictionScale::physical;
  return out;
}

StationPairs evaluate_at_stations(const PredictionResult& pred,
                                  const std::vector<StationRecord>& stations) {
  if (stations.empty())
    throw DataError("evaluate_at_stations: empty station list");
  if (pred.m() == 0)
    throw DataError("evaluate_at_stations: empty prediction");

  std::map<long long, std::vector<int>> by_period;
  for (int i = 0; i < pred.m(); ++i) by_period[pred.periods[i]].push_back(i);
  const double x_min = pred.points.col(0).minCoeff();
  const double x_max = pred.points.col(0).maxCoeff();
  const double y_min = pred.points.col(1).minCoeff();
  const double y_max = pred.points.col(1).maxCoeff();

  std::map<long long, Eigen::MatrixX2d> pts_cache;
  StationPairs out;
  std::vector<long long> per;
  std::vector<double> obs, mu, lo, hi;
  for (const auto& st : stations) {
    const auto it = by_period.find(st.period);
    if (it == by_period.end())
      throw DataError("evaluate_at_stations: no predictions for period " +
                      std::to_string(st.period));
    if (!st.value) {
      ++out.dropped_missing;
      continue;
    }
    if (st.x < x_min || st.x > x_max || st.y < y_min || st.y > y_max)
      ++out.outside_extent;
    Eigen::MatrixX2d& pts = pts_cache[st.period];
    if (pts.rows() == 0) {
      pts.resize(static_cast<long>(it->second.size()), 2);
      for (std::size_t r = 0; r < it->second.size(); ++r)
        pts.row(static_cast<long>(r)) = pred.points.row(it->second[r]);
    }
    const int row = it->second[static_cast<std::size_t>(
        nearest_point(pts, st.x, st.y))];
    per.push_back(st.period);
    obs.push_back(*st.value);
    mu.push_back(pred.mean(row));
    lo.push_back(pred.lower(row));
    hi.push_back(pred.upper(row));
  }
  out.periods = std::move(per);
  out.observed = Eigen::Map<const Eigen::VectorXd>(obs.data(),
                                                   static_cast<long>(obs.size()));
  out.predicted = Eigen::Map<const Eigen::VectorXd>(mu.data(),
                                                    static_cast<long>(mu.size()));
  out.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(),
                                                static_cast<long>(lo.size()));
  out.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(),
                                                static_cast<long>(hi.size()));
  return out;
}

}  // namespace svcgp
