#include "brpc/particle.hpp"

#include <cmath>

namespace brpc {

void ParticleCloud::validate() const {
  if (particles.size() != static_cast<std::size_t>(weights.size()))
    throw InvalidInput("particle/weight count mismatch");
  if (weights.size() == 0) throw InvalidInput("empty particle cloud");
  if (weights.minCoeff() < 0.0) throw InvalidInput("negative particle weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw InvalidInput("particle weights not normalized");
}

void ThetaFilterConfig::validate() const {
  if (num_particles <= 0) throw InvalidInput("num_particles must be positive");
  if (rw_scale <= 0.0 || eta_theta <= 0.0 || obs_sd <= 0.0)
    throw InvalidInput("filter scales must be positive");
  if (theta_lo >= theta_hi) throw InvalidInput("admissible range is empty");
  if (ess_ratio <= 0.0 || ess_ratio > 1.0) throw InvalidInput("ess_ratio must be in (0, 1]");
}

ParticleCloud init_cloud(const ThetaFilterConfig& cfg, int theta_dim, Rng& rng) {
  cfg.validate();
  ParticleCloud cloud;
  cloud.particles.resize(static_cast<std::size_t>(cfg.num_particles), Vector(theta_dim));
  for (auto& theta : cloud.particles)
    for (int d = 0; d < theta_dim; ++d) theta(d) = rng.uniform(cfg.theta_lo, cfg.theta_hi);
  cloud.weights = Vector::Constant(cfg.num_particles, 1.0 / cfg.num_particles);
  return cloud;
}

void propagate(ParticleCloud& cloud, const ThetaFilterConfig& cfg, Rng& rng) {
  for (auto& theta : cloud.particles)
    for (Eigen::Index d = 0; d < theta.size(); ++d)
      theta(d) = std::min(std::max(theta(d) + cfg.rw_scale * rng.normal(), cfg.theta_lo),
                          cfg.theta_hi);
}

void reweight(ParticleCloud& cloud, const Batch& batch, const SimulatorSpec& sim,
              const ThetaFilterConfig& cfg) {
  const int n = cloud.size();
  const int k = batch.size();
  const double inv_var = 1.0 / (cfg.obs_sd * cfg.obs_sd);
  const double log_norm = -0.5 * k * std::log(2.0 * M_PI * cfg.obs_sd * cfg.obs_sd);
  Vector log_w(n);
  for (int i = 0; i < n; ++i) {
    double ss = 0.0;
    for (int j = 0; j < k; ++j) {
      const double r = batch.observations(j) -
                       simulator_eval(sim, batch.inputs[static_cast<std::size_t>(j)],
                                      cloud.particles[static_cast<std::size_t>(i)]);
      ss += r * r;
    }
    const double log_lik = log_norm - 0.5 * ss * inv_var;
    log_w(i) = std::log(cloud.weights(i)) + cfg.eta_theta * log_lik;
  }
  const double lse = log_sum_exp(log_w);
  if (!std::isfinite(lse)) throw NumericalError("reweight: all particle weights underflowed");
  cloud.weights = (log_w.array() - lse).exp();
  cloud.weights /= cloud.weights.sum();  // remove residual rounding
}

double ess(const ParticleCloud& cloud) { return 1.0 / cloud.weights.squaredNorm(); }

void resample_systematic(ParticleCloud& cloud, Rng& rng) {
  const int n = cloud.size();
  const double u0 = rng.uniform() / n;
  std::vector<Vector> next;
  next.reserve(static_cast<std::size_t>(n));
  double cum = cloud.weights(0);
  int j = 0;
  for (int i = 0; i < n; ++i) {
    const double u = u0 + static_cast<double>(i) / n;
    while (cum < u && j + 1 < n) cum += cloud.weights(++j);
    next.push_back(cloud.particles[static_cast<std::size_t>(j)]);
  }
  cloud.particles = std::move(next);
  cloud.weights = Vector::Constant(n, 1.0 / n);
}

bool theta_filter_step(ParticleCloud& cloud, const Batch& batch, const SimulatorSpec& sim,
                       const ThetaFilterConfig& cfg, Rng& rng) {
  propagate(cloud, cfg, rng);
  reweight(cloud, batch, sim, cfg);
  if (ess(cloud) < cfg.ess_ratio * cloud.size()) {
    resample_systematic(cloud, rng);
    return true;
  }
  return false;
}

Vector posterior_mean(const ParticleCloud& cloud) {
  Vector m = Vector::Zero(cloud.particles.front().size());
  for (int i = 0; i < cloud.size(); ++i) m += cloud.weights(i) * cloud.particles[static_cast<std::size_t>(i)];
  return m;
}

}  // namespace brpc
