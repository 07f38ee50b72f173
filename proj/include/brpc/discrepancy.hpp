#pragma once

#include "brpc/particle.hpp"

namespace brpc {

enum class DiscrepancyVariant { E, F, P };

/// Recursive Gaussian discrepancy posterior. The support is S_t for variants
/// E/P (expanding, pruned at max_support) and the fixed inducing set Z for F.
struct DiscrepancyState {
  DiscrepancyVariant variant = DiscrepancyVariant::E;
  SupportSet support;
  GaussianState gaussian;  // dim = |support|
  KernelConfig kernel;

  void validate() const;
};

struct DiscrepancyUpdateConfig {
  double eta_delta = 1.0;
  double residual_noise_sd = 0.05;  // R_t = sd^2 I (modeling noise, not generation noise)
  double inflation_sd = 0.0;       // random-walk inflation on the carried covariance
  int fixed_support_size = 32;      // variant F inducing points
  int max_support = 400;            // variant E/P support cap (oldest pruned first)
  bool shared = true;               // shared-discrepancy representation (default)

  void validate() const;
};

enum class ResidualSource { Shared, Particle, RraSegment };

struct ResidualBatch {
  SupportSet inputs;
  Vector residuals;
  ResidualSource source = ResidualSource::Shared;
  int particle_index = -1;
};

struct ProxyObservations {
  SupportSet support;
  Vector values;     // y-tilde
  Matrix noise_cov;  // Lambda

  bool empty() const { return support.empty(); }
};

/// Fresh zero-mean prior. Variant F materializes the inducing support
/// immediately (equally spaced over [0,1]^d axes for d=1; low-discrepancy
/// otherwise); E/P start with an empty support.
DiscrepancyState init_discrepancy(DiscrepancyVariant variant, const KernelConfig& kernel,
                                  const DiscrepancyUpdateConfig& cfg, int input_dim);

/// r_t = Y_t - sum_i w^(i) y_s(X_t, theta^(i)).
ResidualBatch shared_residual(const Batch& batch, const ParticleCloud& cloud,
                              const SimulatorSpec& sim);

/// Residual against a single particle (particle-specific mode).
ResidualBatch particle_residual(const Batch& batch, const Vector& theta, int index,
                                const SimulatorSpec& sim);

/// Result of propagating the carried posterior to the new batch: the
/// predictive prior (a_t, P_t) on the working support, the observation
/// operator G onto the batch rows, and the effective residual noise R_eff.
struct PropagatedState {
  SupportSet support;   // working support after propagation
  GaussianState pre;    // (a_t, P_t)
  Matrix obs_operator;  // G: batch rows x |support|
  Matrix noise_cov;     // R_eff: batch x batch
  Matrix transition;    // A_t: |support| x |old support| (for replay diagnostics)
};

PropagatedState propagate_state(const DiscrepancyState& state, const SupportSet& new_inputs,
                                const DiscrepancyUpdateConfig& cfg);

/// Information-form KL-regularized update:
///   J = P^{-1} + eta G' R^{-1} G,  h = P^{-1} a + eta G' R^{-1} r,
/// returning N(J^{-1} h, J^{-1}).
GaussianState assimilate(const GaussianState& pre, const Matrix& obs_operator,
                         const Matrix& noise_cov, const ResidualBatch& residual,
                         double eta_delta);

/// Propagate + assimilate, writing the posterior back into the state.
/// Returns the propagation record for diagnostics.
PropagatedState discrepancy_step(DiscrepancyState& state, const ResidualBatch& residual,
                                 const DiscrepancyUpdateConfig& cfg);

/// Offline restart-aware refit: one GP regression on residuals stacked over
/// the segment, all computed with the current cloud. Support capped at
/// cfg.max_support, most recent points kept.
DiscrepancyState rra_refit(const std::vector<Batch>& segment, const ParticleCloud& cloud,
                           const SimulatorSpec& sim, const KernelConfig& kernel,
                           const DiscrepancyUpdateConfig& cfg);

/// Particle-mixture predictive law at X_star: component mean
/// y_s(X_star, theta_i) + G* m, shared covariance Q* + G* C G*' + noise_sd^2 I.
GaussianMixture predictive_law(const DiscrepancyState& state, const ParticleCloud& cloud,
                               const SupportSet& x_star, const SimulatorSpec& sim,
                               double noise_sd);

/// Encode the posterior as proxy observations (y-tilde, Lambda) such that
/// prior x proxy-likelihood reproduces (m, C). An uninformative posterior
/// (C = K) yields an empty proxy set.
ProxyObservations proxy_encode(const DiscrepancyState& state);

}  // namespace brpc
