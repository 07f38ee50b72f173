#include "brpc/baselines.hpp"

#include <cmath>

namespace brpc {

void BcConfig::validate() const {
  if (window <= 0 || theta_grid <= 1) throw InvalidInput("bc: window/grid must be positive");
  if (theta_lo >= theta_hi) throw InvalidInput("bc: empty grid range");
  if (obs_sd <= 0.0) throw InvalidInput("bc: obs_sd must be positive");
  disc_kernel.validate();
}

void bc_observe(BcState& state, const Batch& batch, const BcConfig& cfg) {
  for (int k = 0; k < batch.size(); ++k)
    state.window.emplace_back(batch.inputs[static_cast<std::size_t>(k)], batch.observations(k));
  while (static_cast<int>(state.window.size()) > cfg.window) state.window.pop_front();
}

BcFit bc_window_step(const BcState& state, const BcConfig& cfg, const SimulatorSpec& sim) {
  cfg.validate();
  BcFit fit;
  const std::size_t n = state.window.size();
  if (n == 0) {
    fit.theta = cfg.theta_lo;
    fit.residuals = Vector(0);
    return fit;
  }
  std::vector<Vector> xs;
  Vector ys(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(state.window[i].first);
    ys(static_cast<Eigen::Index>(i)) = state.window[i].second;
  }
  SupportSet support{std::move(xs)};

  // the GP covariance does not depend on theta: one factorization serves the
  // whole grid
  Matrix obs_cov = kernel_matrix(support, support, cfg.disc_kernel);
  obs_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  const PdFactor obs_f(obs_cov);
  const double log_det = obs_f.log_det();
  const double log_norm =
      -0.5 * (static_cast<double>(n) * std::log(2.0 * M_PI) + log_det);

  double best_ll = -std::numeric_limits<double>::infinity();
  double best_theta = cfg.theta_lo;
  Vector best_res;
  Vector theta_v(1);
  for (int g = 0; g < cfg.theta_grid; ++g) {
    const double theta = cfg.theta_lo + (cfg.theta_hi - cfg.theta_lo) * g / (cfg.theta_grid - 1);
    theta_v(0) = theta;
    Vector res(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      res(static_cast<Eigen::Index>(i)) =
          state.window[i].second - simulator_eval(sim, support[i], theta_v);
    const double ll = log_norm - 0.5 * res.dot(obs_f.solve(res));
    if (ll > best_ll) {  // strict: ties keep the lowest index
      best_ll = ll;
      best_theta = theta;
      best_res = res;
    }
  }
  fit.theta = best_theta;
  fit.support = std::move(support);
  fit.residuals = best_res;
  return fit;
}

GaussianState bc_predict(const BcFit& fit, const SupportSet& x_star, const BcConfig& cfg,
                         const SimulatorSpec& sim) {
  const Eigen::Index k = static_cast<Eigen::Index>(x_star.size());
  Vector theta_v(1);
  theta_v(0) = fit.theta;
  Vector sim_mean(k);
  for (Eigen::Index j = 0; j < k; ++j)
    sim_mean(j) = simulator_eval(sim, x_star[static_cast<std::size_t>(j)], theta_v);

  GaussianState out;
  if (fit.support.empty()) {
    out.mean = sim_mean;
    out.covariance = kernel_matrix(x_star, x_star, cfg.disc_kernel);
  } else {
    Matrix obs_cov = kernel_matrix(fit.support, fit.support, cfg.disc_kernel);
    obs_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
    const PdFactor obs_f(obs_cov);
    const Matrix k_xs = kernel_matrix(x_star, fit.support, cfg.disc_kernel);
    const Matrix gain = obs_f.solve(k_xs.transpose()).transpose();
    out.mean = sim_mean + gain * fit.residuals;
    out.covariance =
        psd_repair(kernel_matrix(x_star, x_star, cfg.disc_kernel) - gain * k_xs.transpose());
  }
  out.covariance.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  return out;
}

// --- Ward-style PF -----------------------------------------------------------

void WardPfConfig::validate() const {
  if (num_particles <= 0) throw InvalidInput("ward: num_particles must be positive");
  if (theta_lo >= theta_hi) throw InvalidInput("ward: empty range");
  if (obs_sd <= 0.0 || rw_sd < 0.0) throw InvalidInput("ward: bad noise scales");
  if (residual_window <= 0) throw InvalidInput("ward: residual_window must be positive");
  if (filter_lengthscale && (ls_lo <= 0.0 || ls_lo >= ls_hi || ls_rw_sd < 0.0))
    throw InvalidInput("ward: bad lengthscale-filter range");
  disc_kernel.validate();
}

WardPfState ward_pf_init(const WardPfConfig& cfg, int theta_dim, Rng& rng) {
  cfg.validate();
  ThetaFilterConfig tcfg;
  tcfg.num_particles = cfg.num_particles;
  tcfg.theta_lo = cfg.theta_lo;
  tcfg.theta_hi = cfg.theta_hi;
  WardPfState state;
  state.cloud = init_cloud(tcfg, theta_dim, rng);
  if (cfg.filter_lengthscale) {
    // append the per-particle lengthscale as one extra state coordinate so
    // resampling keeps (theta, lengthscale) pairs together
    for (auto& p : state.cloud.particles) {
      Vector q(theta_dim + 1);
      q.head(theta_dim) = p;
      q(theta_dim) = rng.uniform(cfg.ls_lo, cfg.ls_hi);
      p = std::move(q);
    }
  }
  return state;
}

namespace {

// GP posterior (mean map and covariance) of the trailing residual window at
// x_star under the given kernel; empty window yields the prior.
void ward_residual_gp_kernel(const WardPfState& state, const SupportSet& x_star,
                             const WardPfConfig& cfg, const KernelConfig& kernel, Vector& mean,
                             Matrix* cov) {
  const Eigen::Index k = static_cast<Eigen::Index>(x_star.size());
  if (state.residuals.empty()) {
    mean = Vector::Zero(k);
    if (cov) *cov = kernel_matrix(x_star, x_star, kernel);
    return;
  }
  std::vector<Vector> xs;
  Vector rs(static_cast<Eigen::Index>(state.residuals.size()));
  for (std::size_t i = 0; i < state.residuals.size(); ++i) {
    xs.push_back(state.residuals[i].x);
    rs(static_cast<Eigen::Index>(i)) = state.residuals[i].resid;
  }
  const SupportSet support{std::move(xs)};
  Matrix obs_cov = kernel_matrix(support, support, kernel);
  obs_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  const PdFactor obs_f(obs_cov);
  const Matrix k_xs = kernel_matrix(x_star, support, kernel);
  const Matrix gain = obs_f.solve(k_xs.transpose()).transpose();
  mean = gain * rs;
  if (cov) *cov = psd_repair(kernel_matrix(x_star, x_star, kernel) - gain * k_xs.transpose());
}

void ward_residual_gp(const WardPfState& state, const SupportSet& x_star,
                      const WardPfConfig& cfg, Vector& mean, Matrix& cov) {
  ward_residual_gp_kernel(state, x_star, cfg, cfg.disc_kernel, mean, &cov);
}

KernelConfig ward_particle_kernel(const WardPfConfig& cfg, double lengthscale) {
  KernelConfig k = cfg.disc_kernel;
  k.lengthscale = lengthscale;
  return k;
}

// weighted-mean lengthscale of a lengthscale-filtering cloud (last coordinate)
double ward_mean_lengthscale(const ParticleCloud& cloud) {
  const Eigen::Index last = cloud.particles.front().size() - 1;
  double m = 0.0;
  for (int i = 0; i < cloud.size(); ++i)
    m += cloud.weights(i) * cloud.particles[static_cast<std::size_t>(i)](last);
  return m;
}

// mean map from window residuals to x_star under the given kernel: the gain
// matrix G with GP mean = G r; residual vector r supplied per particle
Matrix ward_gain(const WardPfState& state, const SupportSet& x_star, const WardPfConfig& cfg,
                 const KernelConfig& kernel) {
  std::vector<Vector> xs;
  for (const auto& pt : state.residuals) xs.push_back(pt.x);
  const SupportSet support{std::move(xs)};
  Matrix obs_cov = kernel_matrix(support, support, kernel);
  obs_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  const Matrix k_xs = kernel_matrix(x_star, support, kernel);
  return PdFactor(obs_cov).solve(k_xs.transpose()).transpose();
}

// residuals of the trailing window against one particle's theta
Vector ward_particle_residuals(const WardPfState& state, const SimulatorSpec& sim,
                               const Vector& theta) {
  Vector r(static_cast<Eigen::Index>(state.residuals.size()));
  for (std::size_t i = 0; i < state.residuals.size(); ++i)
    r(static_cast<Eigen::Index>(i)) =
        state.residuals[i].y - simulator_eval(sim, state.residuals[i].x, theta);
  return r;
}

}  // namespace

GaussianMixture ward_pf_predict(const WardPfState& state, const SupportSet& x_star,
                                const WardPfConfig& cfg, const SimulatorSpec& sim) {
  const int theta_dim = sim.theta_dim();
  Vector disc_mean;
  Matrix disc_cov;
  if (cfg.filter_lengthscale) {
    // shared predictive covariance at the posterior-mean lengthscale; each
    // particle contributes the GP mean under its own lengthscale
    ward_residual_gp_kernel(state, x_star, cfg,
                            ward_particle_kernel(cfg, ward_mean_lengthscale(state.cloud)),
                            disc_mean, &disc_cov);
  } else {
    ward_residual_gp(state, x_star, cfg, disc_mean, disc_cov);
  }

  GaussianMixture mix;
  mix.weights.assign(state.cloud.weights.data(),
                     state.cloud.weights.data() + state.cloud.weights.size());
  mix.shared_cov = disc_cov;
  mix.shared_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  const Eigen::Index k = static_cast<Eigen::Index>(x_star.size());
  const bool has_window = !state.residuals.empty();
  Matrix shared_gain;
  if (has_window && cfg.per_particle_anchor && !cfg.filter_lengthscale)
    shared_gain = ward_gain(state, x_star, cfg, cfg.disc_kernel);
  for (int i = 0; i < state.cloud.size(); ++i) {
    const Vector& p = state.cloud.particles[static_cast<std::size_t>(i)];
    Vector mu_disc = disc_mean;
    if (has_window && cfg.per_particle_anchor) {
      const Vector r_i = ward_particle_residuals(state, sim, p.head(theta_dim));
      mu_disc = cfg.filter_lengthscale
                    ? Vector(ward_gain(state, x_star, cfg,
                                       ward_particle_kernel(cfg, p(theta_dim))) *
                             r_i)
                    : Vector(shared_gain * r_i);
    } else if (cfg.filter_lengthscale) {
      ward_residual_gp_kernel(state, x_star, cfg, ward_particle_kernel(cfg, p(theta_dim)),
                              mu_disc, nullptr);
    }
    Vector mu(k);
    for (Eigen::Index j = 0; j < k; ++j)
      mu(j) = simulator_eval(sim, x_star[static_cast<std::size_t>(j)], p.head(theta_dim));
    mix.means.push_back(mu + mu_disc);
  }
  return mix;
}

void ward_pf_step(WardPfState& state, const Batch& batch, const WardPfConfig& cfg,
                  const SimulatorSpec& sim, Rng& rng) {
  cfg.validate();
  const int theta_dim = sim.theta_dim();
  // random-walk proposal with clipping; the trailing lengthscale coordinate
  // (if present) walks with its own scale and range
  for (auto& theta : state.cloud.particles) {
    for (Eigen::Index d = 0; d < theta_dim; ++d)
      theta(d) =
          std::min(std::max(theta(d) + cfg.rw_sd * rng.normal(), cfg.theta_lo), cfg.theta_hi);
    if (cfg.filter_lengthscale)
      theta(theta_dim) = std::min(
          std::max(theta(theta_dim) + cfg.ls_rw_sd * rng.normal(), cfg.ls_lo), cfg.ls_hi);
  }

  // full-model likelihood: simulator + trailing-residual GP mean (under the
  // particle's own lengthscale and/or its own residual anchor when jointly
  // filtered)
  const bool has_window = !state.residuals.empty();
  Vector disc_mean;
  Matrix shared_gain;
  if (has_window && !cfg.filter_lengthscale) {
    if (cfg.per_particle_anchor)
      shared_gain = ward_gain(state, batch.support(), cfg, cfg.disc_kernel);
    else
      ward_residual_gp_kernel(state, batch.support(), cfg, cfg.disc_kernel, disc_mean, nullptr);
  }
  const int n = state.cloud.size();
  const double inv_var = 1.0 / (cfg.obs_sd * cfg.obs_sd);
  Vector log_w(n);
  for (int i = 0; i < n; ++i) {
    const Vector& p = state.cloud.particles[static_cast<std::size_t>(i)];
    Vector mu_disc = Vector::Zero(batch.size());
    if (has_window) {
      if (cfg.per_particle_anchor) {
        const Vector r_i = ward_particle_residuals(state, sim, p.head(theta_dim));
        mu_disc = cfg.filter_lengthscale
                      ? Vector(ward_gain(state, batch.support(), cfg,
                                         ward_particle_kernel(cfg, p(theta_dim))) *
                               r_i)
                      : Vector(shared_gain * r_i);
      } else if (cfg.filter_lengthscale) {
        ward_residual_gp_kernel(state, batch.support(), cfg,
                                ward_particle_kernel(cfg, p(theta_dim)), mu_disc, nullptr);
      } else {
        mu_disc = disc_mean;
      }
    }
    double ss = 0.0;
    for (int k = 0; k < batch.size(); ++k) {
      const double pred =
          simulator_eval(sim, batch.inputs[static_cast<std::size_t>(k)], p.head(theta_dim)) +
          mu_disc(k);
      const double r = batch.observations(k) - pred;
      ss += r * r;
    }
    log_w(i) = std::log(state.cloud.weights(i)) - 0.5 * ss * inv_var;
  }
  const double lse = log_sum_exp(log_w);
  if (!std::isfinite(lse)) throw NumericalError("ward_pf_step: weights underflowed");
  state.cloud.weights = (log_w.array() - lse).exp();
  state.cloud.weights /= state.cloud.weights.sum();

  if (ess(state.cloud) < 0.5 * n) resample_systematic(state.cloud, rng);

  // refresh the trailing residual window against the new posterior-mean theta
  const Vector theta_hat = posterior_mean(state.cloud).head(theta_dim);
  for (int k = 0; k < batch.size(); ++k) {
    const double r = batch.observations(k) -
                     simulator_eval(sim, batch.inputs[static_cast<std::size_t>(k)], theta_hat);
    state.residuals.push_back(
        {batch.inputs[static_cast<std::size_t>(k)], batch.observations(k), r});
  }
  while (static_cast<int>(state.residuals.size()) > cfg.residual_window)
    state.residuals.pop_front();
}

// --- joint EnKF --------------------------------------------------------------

void EnkfConfig::validate() const {
  if (ensemble < 2) throw InvalidInput("enkf: ensemble size must be >= 2");
  if (theta_lo >= theta_hi) throw InvalidInput("enkf: empty range");
  if (sigma_theta < 0.0 || sigma_beta < 0.0 || obs_sd <= 0.0)
    throw InvalidInput("enkf: bad noise scales");
  if (rho_beta <= 0.0 || rho_beta > 1.0) throw InvalidInput("enkf: rho_beta must be in (0,1]");
  if (inflation < 1.0) throw InvalidInput("enkf: inflation must be >= 1");
  if (rbf_centers < 0 || rbf_width <= 0.0) throw InvalidInput("enkf: bad basis");
}

EnkfState enkf_init(const EnkfConfig& cfg, int theta_dim, Rng& rng) {
  cfg.validate();
  EnkfState state;
  state.theta_dim = theta_dim;
  state.members = Matrix::Zero(cfg.ensemble, theta_dim + cfg.basis_dim());
  for (int i = 0; i < cfg.ensemble; ++i)
    for (int d = 0; d < theta_dim; ++d)
      state.members(i, d) = rng.uniform(cfg.theta_lo, cfg.theta_hi);
  return state;
}

Vector enkf_basis(const EnkfConfig& cfg, const Vector& x) {
  Vector b(cfg.basis_dim());
  const double x0 = x(0);
  b(0) = 1.0;
  b(1) = x0;
  for (int j = 0; j < cfg.rbf_centers; ++j) {
    const double c = cfg.rbf_centers == 1 ? 0.5 : static_cast<double>(j) / (cfg.rbf_centers - 1);
    b(2 + j) = std::exp(-(x0 - c) * (x0 - c) / (2.0 * cfg.rbf_width * cfg.rbf_width));
  }
  return b;
}

namespace {

Vector enkf_member_prediction(const EnkfState& state, int i, const SupportSet& xs,
                              const EnkfConfig& cfg, const SimulatorSpec& sim) {
  const Vector theta = state.members.row(i).head(state.theta_dim);
  const Vector beta = state.members.row(i).tail(cfg.basis_dim());
  Vector y(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k)
    y(static_cast<Eigen::Index>(k)) =
        simulator_eval(sim, xs[k], theta) + enkf_basis(cfg, xs[k]).dot(beta);
  return y;
}

}  // namespace

GaussianMixture enkf_predict(const EnkfState& state, const SupportSet& x_star,
                             const EnkfConfig& cfg, const SimulatorSpec& sim) {
  const int n = static_cast<int>(state.members.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(x_star.size());
  Matrix preds(n, k);
  for (int i = 0; i < n; ++i)
    preds.row(i) = enkf_member_prediction(state, i, x_star, cfg, sim).transpose();
  const Vector mean = preds.colwise().mean();
  const Matrix anomalies = preds.rowwise() - mean.transpose();
  GaussianMixture mix;
  mix.weights = {1.0};
  mix.means = {mean};
  mix.shared_cov = psd_repair(anomalies.transpose() * anomalies / (n - 1));
  mix.shared_cov.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  return mix;
}

void enkf_step(EnkfState& state, const Batch& batch, const EnkfConfig& cfg,
               const SimulatorSpec& sim, Rng& rng) {
  cfg.validate();
  const int n = static_cast<int>(state.members.rows());
  const int d = static_cast<int>(state.members.cols());
  const int kb = batch.size();

  // forecast: damped random walk (theta clipped, beta damped)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < state.theta_dim; ++j)
      state.members(i, j) = std::min(
          std::max(state.members(i, j) + cfg.sigma_theta * rng.normal(), cfg.theta_lo),
          cfg.theta_hi);
    for (int j = state.theta_dim; j < d; ++j)
      state.members(i, j) = cfg.rho_beta * state.members(i, j) + cfg.sigma_beta * rng.normal();
  }

  // predicted observations per member
  const SupportSet xs = batch.support();
  Matrix preds(n, kb);
  for (int i = 0; i < n; ++i)
    preds.row(i) = enkf_member_prediction(state, i, xs, cfg, sim).transpose();

  const Vector z_mean = state.members.colwise().mean();
  const Vector y_mean = preds.colwise().mean();
  Matrix z_anom = state.members.rowwise() - z_mean.transpose();
  z_anom *= cfg.inflation;
  const Matrix y_anom = preds.rowwise() - y_mean.transpose();

  const Matrix c_zy = z_anom.transpose() * y_anom / (n - 1);
  Matrix c_yy = y_anom.transpose() * y_anom / (n - 1);
  c_yy.diagonal().array() += cfg.obs_sd * cfg.obs_sd;
  const PdFactor c_yy_f(psd_repair(c_yy) + 1e-12 * Matrix::Identity(kb, kb));
  const Matrix gain = c_yy_f.solve(c_zy.transpose()).transpose();

  // perturbed-observation analysis
  for (int i = 0; i < n; ++i) {
    Vector innov = batch.observations - preds.row(i).transpose();
    for (int k = 0; k < kb; ++k) innov(k) += cfg.obs_sd * rng.normal();
    state.members.row(i) += (gain * innov).transpose();
    for (int j = 0; j < state.theta_dim; ++j)
      state.members(i, j) = std::min(std::max(state.members(i, j), cfg.theta_lo), cfg.theta_hi);
  }
}

Vector enkf_theta_mean(const EnkfState& state) {
  return state.members.leftCols(state.theta_dim).colwise().mean();
}

}  // namespace brpc
