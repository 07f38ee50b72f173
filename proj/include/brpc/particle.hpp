#pragma once

#include "brpc/rng.hpp"
#include "brpc/stream.hpp"

namespace brpc {

/// Weighted particle representation of the calibration-parameter posterior.
struct ParticleCloud {
  std::vector<Vector> particles;
  Vector weights;  // nonnegative, sums to 1

  int size() const { return static_cast<int>(particles.size()); }
  void validate() const;
};

struct ThetaFilterConfig {
  int num_particles = 1024;
  double rw_scale = 0.1;      // random-walk transition sd, per coordinate
  double theta_lo = 0.0;      // admissible range
  double theta_hi = 3.0;
  double eta_theta = 1.0;     // likelihood tempering exponent
  double obs_sd = 0.05;       // modeling noise sd in the projected likelihood
  double ess_ratio = 0.5;     // resample when ESS < ess_ratio * N

  void validate() const;
};

ParticleCloud init_cloud(const ThetaFilterConfig& cfg, int theta_dim, Rng& rng);

/// Random-walk proposal; each coordinate perturbed independently and clipped
/// to the admissible range. Weights unchanged.
void propagate(ParticleCloud& cloud, const ThetaFilterConfig& cfg, Rng& rng);

/// Multiply weights by the tempered discrepancy-free likelihood
/// N(Y; y_s(X, theta), obs_sd^2 I)^eta_theta and renormalize (log-space).
void reweight(ParticleCloud& cloud, const Batch& batch, const SimulatorSpec& sim,
              const ThetaFilterConfig& cfg);

double ess(const ParticleCloud& cloud);

/// Systematic resampling: one uniform offset, stride 1/N over the cumulative
/// weights. Output weights are uniform.
void resample_systematic(ParticleCloud& cloud, Rng& rng);

/// Full filter step: propagate, reweight, resample iff ESS < ess_ratio * N.
/// Returns true when a resample happened.
bool theta_filter_step(ParticleCloud& cloud, const Batch& batch, const SimulatorSpec& sim,
                       const ThetaFilterConfig& cfg, Rng& rng);

Vector posterior_mean(const ParticleCloud& cloud);

}  // namespace brpc
