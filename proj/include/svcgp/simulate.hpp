#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svcgp/covariance.hpp"
#include "svcgp/field.hpp"
#include "svcgp/grid.hpp"
#include "svcgp/model.hpp"

namespace svcgp {

// Coarse-scale linear model: C_t(s) = alpha + beta' X_t(s) + eps_t(s),
// with eps white in space and time, Var(eps) = zeta_sq.
struct GlobalParams {
  double alpha = 0.0;
  Eigen::VectorXd beta;  // size q
  double zeta_sq = 1.0;
};

// Fine-scale corrections: intercept process with mean beta0 and kernel
// theta0, optional varying-slope processes with mean beta1 and shared
// kernel theta1 (slopes are constant at beta1 when theta1 is absent), white
// noise tau_sq, and the temporal dependence of the coefficient processes.
struct RegionalParams {
  double beta0 = 0.0;
  Eigen::VectorXd beta1;  // size q
  KernelParams theta0;
  std::optional<KernelParams> theta1;
  double tau_sq = 1.0;
  TemporalStructure temporal;
};

// Zero-mean Gaussian field with separable covariance R_T (x) Sigma(kernel).
// AR(1) dependence is sampled recursively in t (innovations scaled by
// sqrt(1-rho^2)), which has the same law as factorizing the nT covariance.
SpaceTimeField sample_gp(const Eigen::MatrixX2d& pts, const KernelParams& kp,
                         const TemporalStructure& temporal, int T,
                         std::uint64_t seed);

// Covariate fields on the coarse grid: independent standard normal per
// (period, location), one matrix (n x T) per covariate.
std::vector<Eigen::MatrixXd> simulate_covariates(int n, int T, int q,
                                                 std::uint64_t seed);

// Coarse field draw; x must hold q matrices shaped n x T.
SpaceTimeField simulate_global(const Eigen::MatrixX2d& coarse_pts,
                               const GlobalParams& gp,
                               const std::vector<Eigen::MatrixXd>& x, int T,
                               std::uint64_t seed);

// Latent pieces of a regional draw, kept for algebraic-identity checks.
struct RegionalComponents {
  Eigen::MatrixXd alpha_r;              // varying intercept incl. mean
  std::vector<Eigen::MatrixXd> beta_r;  // varying slopes incl. mean
  Eigen::MatrixXd gamma;                // fine-scale white noise
  Eigen::MatrixXd eps;                  // coarse white noise (shared draw)
};

// Joint coarse/fine simulation.  The eps realization entering the fine
// field is the same draw that simulate_global produces for this seed, so
// the response Y = C_fine - C_coarse(map) cancels it exactly.
struct RegionalSim {
  SpaceTimeField c_coarse;              // on the coarse grid
  SpaceTimeField c_fine;                // on the fine grid
  SpaceTimeField y;                     // response on the fine grid
  std::vector<Eigen::MatrixXd> x_fine;  // covariates mapped to fine rows
  RegionalComponents parts;
};
RegionalSim simulate_regional(const GridPair& pair, const GlobalParams& gp,
                              const RegionalParams& rp,
                              const std::vector<Eigen::MatrixXd>& x_coarse,
                              int T, std::uint64_t seed);

// Y_t(w) = C_t(w) - C_t(nearest coarse point of w).
SpaceTimeField make_response(const SpaceTimeField& c_fine,
                             const SpaceTimeField& c_coarse,
                             const std::vector<int>& fine_to_coarse);

}  // namespace svcgp
