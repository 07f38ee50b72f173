#pragma once

#include <deque>

#include "brpc/particle.hpp"

namespace brpc {

// --- sliding-window Bayesian recalibration ---------------------------------

struct BcConfig {
  int window = 80;
  int theta_grid = 200;
  double theta_lo = 0.0;
  double theta_hi = 3.0;
  double obs_sd = 0.2;
  KernelConfig disc_kernel{1.0, 0.3};

  void validate() const;
};

struct BcState {
  std::deque<std::pair<Vector, double>> window;  // (x, y), most recent last
};

void bc_observe(BcState& state, const Batch& batch, const BcConfig& cfg);

/// Fitted window: grid-argmax calibration value and the residual data the
/// predictive GP conditions on.
struct BcFit {
  double theta = 0.0;
  SupportSet support;
  Vector residuals;
};

/// Fit a zero-mean GP to the window residuals for every grid value of theta
/// and pick the marginal-likelihood argmax (ties -> lowest index). An empty
/// window degenerates to the first grid value with a prior predictive.
BcFit bc_window_step(const BcState& state, const BcConfig& cfg, const SimulatorSpec& sim);

GaussianState bc_predict(const BcFit& fit, const SupportSet& x_star, const BcConfig& cfg,
                         const SimulatorSpec& sim);

// --- Ward-style particle-filter data assimilation ---------------------------

struct WardPfConfig {
  int num_particles = 1024;
  double theta_lo = 0.0;
  double theta_hi = 3.0;
  double obs_sd = 0.2;
  double rw_sd = 0.05;
  int residual_window = 80;
  KernelConfig disc_kernel{1.0, 0.3};
  // Joint filtering of the residual-GP lengthscale: each particle carries its
  // own lengthscale (appended as an extra state coordinate) and is weighted by
  // the full-model likelihood under its own GP fit of the trailing window.
  bool filter_lengthscale = false;
  double ls_lo = 0.1;
  double ls_hi = 5.0;
  double ls_rw_sd = 0.05;
  // Moving-particle form of the joint update: the trailing residual window is
  // re-evaluated against each particle's own theta, so parameter shifts and
  // discrepancy absorb each other through the same assimilation pass.
  bool per_particle_anchor = false;

  void validate() const;
};

struct WardWindowPoint {
  Vector x;
  double y = 0.0;       // raw observation
  double resid = 0.0;   // residual against the posterior-mean theta at insertion
};

struct WardPfState {
  ParticleCloud cloud;
  std::deque<WardWindowPoint> residuals;  // trailing residual window
};

WardPfState ward_pf_init(const WardPfConfig& cfg, int theta_dim, Rng& rng);

/// Predictive mixture before seeing the batch: simulator at each particle
/// plus the trailing-residual GP mean, shared GP predictive covariance.
GaussianMixture ward_pf_predict(const WardPfState& state, const SupportSet& x_star,
                                const WardPfConfig& cfg, const SimulatorSpec& sim);

void ward_pf_step(WardPfState& state, const Batch& batch, const WardPfConfig& cfg,
                  const SimulatorSpec& sim, Rng& rng);

// --- joint-state ensemble Kalman filter -------------------------------------

struct EnkfConfig {
  int ensemble = 256;
  double theta_lo = 0.0;
  double theta_hi = 3.0;
  double sigma_theta = 0.035;
  double sigma_beta = 0.015;
  double rho_beta = 0.98;
  double inflation = 1.02;  // multiplicative state-anomaly inflation
  int rbf_centers = 6;      // plus intercept and linear term
  double rbf_width = 0.15;
  double obs_sd = 0.2;

  int basis_dim() const { return 2 + rbf_centers; }
  void validate() const;
};

struct EnkfState {
  Matrix members;  // ensemble x (theta_dim + basis_dim), theta first
  int theta_dim = 1;
};

EnkfState enkf_init(const EnkfConfig& cfg, int theta_dim, Rng& rng);

Vector enkf_basis(const EnkfConfig& cfg, const Vector& x);

/// Ensemble-mean prediction with ensemble spread + observation noise
/// variance, as a single-component mixture.
GaussianMixture enkf_predict(const EnkfState& state, const SupportSet& x_star,
                             const EnkfConfig& cfg, const SimulatorSpec& sim);

void enkf_step(EnkfState& state, const Batch& batch, const EnkfConfig& cfg,
               const SimulatorSpec& sim, Rng& rng);

Vector enkf_theta_mean(const EnkfState& state);

}  // namespace brpc
