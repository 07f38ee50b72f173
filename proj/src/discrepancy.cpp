#include "brpc/discrepancy.hpp"

#include <cmath>

namespace brpc {

namespace {

// Radical-inverse sequence for the fixed multi-dimensional inducing set.
double radical_inverse2(int base, int n) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  for (; n > 0; n /= base) {
    r += f * (n % base);
    f *= inv;
  }
  return r;
}

constexpr int kSmallPrimes[20] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                  31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

Matrix identity_like(Eigen::Index n) { return Matrix::Identity(n, n); }

}  // namespace

void DiscrepancyState::validate() const {
  kernel.validate();
  if (gaussian.mean.size() != static_cast<Eigen::Index>(support.size()) ||
      gaussian.covariance.rows() != gaussian.mean.size() ||
      gaussian.covariance.cols() != gaussian.mean.size())
    throw InvalidInput("discrepancy state dimension mismatch");
}

void DiscrepancyUpdateConfig::validate() const {
  if (eta_delta <= 0.0) throw InvalidInput("eta_delta must be positive");
  if (residual_noise_sd <= 0.0) throw InvalidInput("residual_noise_sd must be positive");
  if (inflation_sd < 0.0) throw InvalidInput("inflation_sd must be nonnegative");
  if (fixed_support_size <= 0 || max_support <= 0)
    throw InvalidInput("support sizes must be positive");
}

DiscrepancyState init_discrepancy(DiscrepancyVariant variant, const KernelConfig& kernel,
                                  const DiscrepancyUpdateConfig& cfg, int input_dim) {
  kernel.validate();
  cfg.validate();
  DiscrepancyState state;
  state.variant = variant;
  state.kernel = kernel;
  if (variant == DiscrepancyVariant::F) {
    const int m = cfg.fixed_support_size;
    std::vector<Vector> pts(static_cast<std::size_t>(m), Vector(input_dim));
    for (int i = 0; i < m; ++i) {
      if (input_dim == 1) {
        pts[static_cast<std::size_t>(i)](0) = m == 1 ? 0.5 : static_cast<double>(i) / (m - 1);
      } else {
        for (int d = 0; d < input_dim; ++d)
          pts[static_cast<std::size_t>(i)](d) = radical_inverse2(kSmallPrimes[d % 20], i + 1);
      }
    }
    state.support = SupportSet(std::move(pts));
    const Matrix k = kernel_matrix(state.support, state.support, kernel);
    state.gaussian = {Vector::Zero(m), k};
  } else {
    state.gaussian = {Vector(0), Matrix(0, 0)};
  }
  return state;
}

ResidualBatch shared_residual(const Batch& batch, const ParticleCloud& cloud,
                              const SimulatorSpec& sim) {
  ResidualBatch out;
  out.inputs = batch.support();
  out.residuals = batch.observations;
  out.source = ResidualSource::Shared;
  for (int k = 0; k < batch.size(); ++k) {
    double mean = 0.0;
    for (int i = 0; i < cloud.size(); ++i)
      mean += cloud.weights(i) * simulator_eval(sim, batch.inputs[static_cast<std::size_t>(k)],
                                                cloud.particles[static_cast<std::size_t>(i)]);
    out.residuals(k) -= mean;
  }
  return out;
}

ResidualBatch particle_residual(const Batch& batch, const Vector& theta, int index,
                                const SimulatorSpec& sim) {
  ResidualBatch out;
  out.inputs = batch.support();
  out.residuals = batch.observations;
  out.source = ResidualSource::Particle;
  out.particle_index = index;
  for (int k = 0; k < batch.size(); ++k)
    out.residuals(k) -= simulator_eval(sim, batch.inputs[static_cast<std::size_t>(k)], theta);
  return out;
}

namespace {

// Expanding-support propagation shared by variants E and P: dedupe the batch
// inputs against the carried support, extend by GP conditioning, prune oldest.
PropagatedState propagate_expanding(const SupportSet& old_support, const GaussianState& carried,
                                    const KernelConfig& kernel, const SupportSet& new_inputs,
                                    const DiscrepancyUpdateConfig& cfg) {
  const Eigen::Index n_old = static_cast<Eigen::Index>(old_support.size());

  SupportSet support = old_support;
  std::vector<Eigen::Index> batch_to_support(new_inputs.size());
  SupportSet novel;
  for (std::size_t k = 0; k < new_inputs.size(); ++k) {
    long idx = support.find(new_inputs[k]);
    if (idx < 0) {
      support.push_back(new_inputs[k]);
      novel.push_back(new_inputs[k]);
      idx = static_cast<long>(support.size()) - 1;
    }
    batch_to_support[k] = idx;
  }
  const Eigen::Index n_new = static_cast<Eigen::Index>(support.size());

  // A_t keeps old coordinates and extends new points by the conditional mean.
  Matrix a_map = Matrix::Zero(n_new, n_old);
  a_map.topLeftCorner(n_old, n_old).setIdentity();
  Matrix q = Matrix::Zero(n_new, n_new);
  if (!novel.empty()) {
    if (n_old == 0) {
      q = kernel_matrix(support, support, kernel);
    } else {
      const GpConditional cond = gp_condition(old_support, novel, kernel);
      a_map.bottomRows(n_new - n_old) = cond.mean_map;
      q.bottomRightCorner(n_new - n_old, n_new - n_old) = cond.cond_cov;
    }
  }

  PropagatedState out;
  out.transition = a_map;
  out.pre.mean = n_old == 0 ? Vector::Zero(n_new) : Vector(a_map * carried.mean);
  out.pre.covariance =
      n_old == 0 ? q : Matrix(q + a_map * carried.covariance * a_map.transpose());
  if (cfg.inflation_sd > 0.0)
    out.pre.covariance.diagonal().array() += cfg.inflation_sd * cfg.inflation_sd;
  out.pre.covariance = psd_repair(out.pre.covariance);

  // prune oldest points beyond the cap (never the just-added batch points)
  const Eigen::Index batch_count = static_cast<Eigen::Index>(novel.size());
  Eigen::Index excess = n_new - cfg.max_support;
  excess = std::min(excess, n_new - batch_count);
  if (excess > 0) {
    support.erase_front(static_cast<std::size_t>(excess));
    out.pre.mean = out.pre.mean.tail(n_new - excess).eval();
    out.pre.covariance = out.pre.covariance.bottomRightCorner(n_new - excess, n_new - excess).eval();
    out.transition = out.transition.bottomRows(n_new - excess).eval();
    for (auto& idx : batch_to_support) idx -= excess;
  }
  out.support = std::move(support);

  const Eigen::Index kb = static_cast<Eigen::Index>(new_inputs.size());
  out.obs_operator = Matrix::Zero(kb, static_cast<Eigen::Index>(out.support.size()));
  for (Eigen::Index k = 0; k < kb; ++k) out.obs_operator(k, batch_to_support[static_cast<std::size_t>(k)]) = 1.0;
  out.noise_cov = cfg.residual_noise_sd * cfg.residual_noise_sd * identity_like(kb);
  return out;
}

}  // namespace

PropagatedState propagate_state(const DiscrepancyState& state, const SupportSet& new_inputs,
                                const DiscrepancyUpdateConfig& cfg) {
  state.validate();
  cfg.validate();
  if (new_inputs.empty()) throw InvalidInput("propagate_state: empty batch");

  if (state.variant == DiscrepancyVariant::F) {
    PropagatedState out;
    out.support = state.support;
    const Eigen::Index m = static_cast<Eigen::Index>(state.support.size());
    out.transition = identity_like(m);
    out.pre.mean = state.gaussian.mean;
    out.pre.covariance = state.gaussian.covariance;
    if (cfg.inflation_sd > 0.0)
      out.pre.covariance.diagonal().array() += cfg.inflation_sd * cfg.inflation_sd;
    const GpConditional cond = gp_condition(state.support, new_inputs, state.kernel);
    out.obs_operator = cond.mean_map;
    const Eigen::Index kb = static_cast<Eigen::Index>(new_inputs.size());
    out.noise_cov =
        cfg.residual_noise_sd * cfg.residual_noise_sd * identity_like(kb) + cond.cond_cov;
    out.noise_cov = psd_repair(out.noise_cov);
    return out;
  }

  if (state.variant == DiscrepancyVariant::P) {
    // re-express the carried posterior as proxy observations, then
    // re-condition the zero-mean prior on them over the expanded support
    const ProxyObservations proxy = proxy_encode(state);
    SupportSet support = state.support;
    std::vector<Eigen::Index> batch_to_support(new_inputs.size());
    for (std::size_t k = 0; k < new_inputs.size(); ++k) {
      long idx = support.find(new_inputs[k]);
      if (idx < 0) {
        support.push_back(new_inputs[k]);
        idx = static_cast<long>(support.size()) - 1;
      }
      batch_to_support[k] = idx;
    }

    PropagatedState out;
    const Eigen::Index n = static_cast<Eigen::Index>(support.size());
    if (proxy.empty()) {
      out.pre.mean = Vector::Zero(n);
      out.pre.covariance = kernel_matrix(support, support, state.kernel);
      out.transition = Matrix::Zero(n, static_cast<Eigen::Index>(state.support.size()));
      out.transition.topLeftCorner(state.support.size(), state.support.size()).setIdentity();
    } else {
      const Matrix k_sp = kernel_matrix(support, proxy.support, state.kernel);
      Matrix k_pp = kernel_matrix(proxy.support, proxy.support, state.kernel);
      const PdFactor obs(psd_repair(k_pp + proxy.noise_cov) +
                         1e-12 * identity_like(k_pp.rows()));
      const Matrix gain = obs.solve(k_sp.transpose()).transpose();
      out.pre.mean = gain * proxy.values;
      out.pre.covariance =
          psd_repair(kernel_matrix(support, support, state.kernel) - gain * k_sp.transpose());
      out.transition = Matrix::Zero(n, static_cast<Eigen::Index>(state.support.size()));
      out.transition.topLeftCorner(state.support.size(), state.support.size()).setIdentity();
    }
    if (cfg.inflation_sd > 0.0)
      out.pre.covariance.diagonal().array() += cfg.inflation_sd * cfg.inflation_sd;

    // prune oldest beyond the cap, keeping the batch points
    const Eigen::Index n_old = static_cast<Eigen::Index>(state.support.size());
    Eigen::Index excess = n - cfg.max_support;
    excess = std::min(excess, n_old);
    if (excess > 0) {
      support.erase_front(static_cast<std::size_t>(excess));
      out.pre.mean = out.pre.mean.tail(n - excess).eval();
      out.pre.covariance = out.pre.covariance.bottomRightCorner(n - excess, n - excess).eval();
      out.transition = out.transition.bottomRows(n - excess).eval();
      for (auto& idx : batch_to_support) idx -= excess;
    }
    out.support = std::move(support);

    const Eigen::Index kb = static_cast<Eigen::Index>(new_inputs.size());
    out.obs_operator = Matrix::Zero(kb, static_cast<Eigen::Index>(out.support.size()));
    for (Eigen::Index k = 0; k < kb; ++k)
      out.obs_operator(k, batch_to_support[static_cast<std::size_t>(k)]) = 1.0;
    out.noise_cov = cfg.residual_noise_sd * cfg.residual_noise_sd * identity_like(kb);
    return out;
  }

  return propagate_expanding(state.support, state.gaussian, state.kernel, new_inputs, cfg);
}

GaussianState assimilate(const GaussianState& pre, const Matrix& obs_operator,
                         const Matrix& noise_cov, const ResidualBatch& residual,
                         double eta_delta) {
  if (eta_delta < 0.0) throw InvalidInput("eta_delta must be nonnegative");
  const Eigen::Index n = pre.dim();
  if (obs_operator.cols() != n || obs_operator.rows() != residual.residuals.size() ||
      noise_cov.rows() != residual.residuals.size())
    throw InvalidInput("assimilate: dimension mismatch");

  const PdFactor p_f(pre.covariance + 1e-12 * pre.covariance.trace() / std::max<Eigen::Index>(n, 1) *
                                          identity_like(n));
  const PdFactor r_f(noise_cov);
  const Matrix r_inv_g = r_f.solve(obs_operator);
  Matrix j = p_f.inverse(n) + eta_delta * obs_operator.transpose() * r_inv_g;
  j = 0.5 * (j + j.transpose());
  const Vector h =
      p_f.solve(pre.mean) + eta_delta * obs_operator.transpose() * r_f.solve(residual.residuals);

  const PdFactor j_f(j);
  GaussianState post;
  post.mean = j_f.solve(h);
  post.covariance = psd_repair(j_f.inverse(n));
  return post;
}

PropagatedState discrepancy_step(DiscrepancyState& state, const ResidualBatch& residual,
                                 const DiscrepancyUpdateConfig& cfg) {
  PropagatedState prop = propagate_state(state, residual.inputs, cfg);
  const GaussianState post =
      assimilate(prop.pre, prop.obs_operator, prop.noise_cov, residual, cfg.eta_delta);
  state.support = prop.support;
  state.gaussian = post;
  return prop;
}

DiscrepancyState rra_refit(const std::vector<Batch>& segment, const ParticleCloud& cloud,
                           const SimulatorSpec& sim, const KernelConfig& kernel,
                           const DiscrepancyUpdateConfig& cfg) {
  if (segment.empty()) throw InvalidInput("rra_refit: empty segment");
  std::vector<Vector> xs;
  std::vector<double> rs;
  for (const Batch& b : segment) {
    const ResidualBatch rb = shared_residual(b, cloud, sim);
    for (std::size_t k = 0; k < rb.inputs.size(); ++k) {
      xs.push_back(rb.inputs[k]);
      rs.push_back(rb.residuals(static_cast<Eigen::Index>(k)));
    }
  }
  // keep the most recent max_support points
  if (static_cast<int>(xs.size()) > cfg.max_support) {
    const std::size_t drop = xs.size() - static_cast<std::size_t>(cfg.max_support);
    xs.erase(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(drop));
    rs.erase(rs.begin(), rs.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  // merge near-duplicate inputs (averaging residuals) so K_SS stays invertible
  SupportSet support;
  std::vector<double> vals;
  std::vector<int> counts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long idx = support.find(xs[i]);
    if (idx < 0) {
      support.push_back(xs[i]);
      vals.push_back(rs[i]);
      counts.push_back(1);
    } else {
      const std::size_t u = static_cast<std::size_t>(idx);
      vals[u] += (rs[i] - vals[u]) / (++counts[u]);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(support.size());
  Vector r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = vals[static_cast<std::size_t>(i)];

  const Matrix k = kernel_matrix(support, support, kernel);
  Matrix obs = k;
  obs.diagonal().array() += cfg.residual_noise_sd * cfg.residual_noise_sd;
  const PdFactor obs_f(obs);
  const Matrix gain = obs_f.solve(k).transpose();

  DiscrepancyState out;
  out.variant = DiscrepancyVariant::E;
  out.kernel = kernel;
  out.support = std::move(support);
  out.gaussian.mean = gain * r;
  out.gaussian.covariance = psd_repair(k - gain * k);
  return out;
}

GaussianMixture predictive_law(const DiscrepancyState& state, const ParticleCloud& cloud,
                               const SupportSet& x_star, const SimulatorSpec& sim,
                               double noise_sd) {
  state.validate();
  if (x_star.empty()) throw InvalidInput("predictive_law: empty prediction set");
  const Eigen::Index k = static_cast<Eigen::Index>(x_star.size());

  GaussianMixture mix;
  mix.weights.assign(cloud.weights.data(), cloud.weights.data() + cloud.weights.size());

  Vector disc_mean = Vector::Zero(k);
  if (state.support.empty()) {
    mix.shared_cov = kernel_matrix(x_star, x_star, state.kernel);
  } else {
    const GpConditional cond = gp_condition(state.support, x_star, state.kernel);
    disc_mean = cond.mean_map * state.gaussian.mean;
    mix.shared_cov = psd_repair(
        cond.cond_cov + cond.mean_map * state.gaussian.covariance * cond.mean_map.transpose());
  }
  mix.shared_cov.diagonal().array() += noise_sd * noise_sd;

  mix.means.reserve(static_cast<std::size_t>(cloud.size()));
  for (int i = 0; i < cloud.size(); ++i) {
    Vector mu(k);
    for (Eigen::Index j = 0; j < k; ++j)
      mu(j) = simulator_eval(sim, x_star[static_cast<std::size_t>(j)],
                             cloud.particles[static_cast<std::size_t>(i)]);
    mix.means.push_back(mu + disc_mean);
  }
  return mix;
}

ProxyObservations proxy_encode(const DiscrepancyState& state) {
  state.validate();
  ProxyObservations out;
  if (state.support.empty()) return out;

  // Work in prior-whitened coordinates: with K = L L' and S = L^-1 C L^-T,
  // the proxy precision Lambda^-1 = C^-1 - K^-1 becomes L^-T (S^-1 - I) L^-1,
  // so its spectrum is mu_i = (1 - d_i) / d_i over the eigenvalues d_i of S.
  // This avoids the catastrophic cancellation of forming C^-1 - K^-1 when K
  // is ill-conditioned. mu is dimensionless, so the clip thresholds are too.
  const Eigen::Index n = static_cast<Eigen::Index>(state.support.size());
  const Matrix k = kernel_matrix(state.support, state.support, state.kernel);
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success)
    throw NumericalError("proxy_encode: prior kernel matrix not positive definite");
  const Matrix l = llt.matrixL();
  const auto l_tri = l.triangularView<Eigen::Lower>();

  Matrix s = l_tri.solve(state.gaussian.covariance);
  s = l_tri.solve(Matrix(s.transpose()));
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector& d = es.eigenvalues();

  Vector mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) <= 0.0)
      throw NumericalError("proxy_encode: posterior covariance not positive definite");
    mu(i) = (1.0 - d(i)) / d(i);
  }
  // uninformative posterior: C = K, all whitened precisions vanish
  if (mu.maxCoeff() <= 1e-8) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mu(i) <= 0.0) {
      if (-mu(i) > 1e-3)
        throw NumericalError("proxy_encode: proxy precision eigenvalue " +
                             std::to_string(mu(i)) + " below tolerance");
      mu(i) = 1e-8;
    }
  }

  const Matrix u = es.eigenvectors();
  const Matrix lu = l * u;
  out.support = state.support;
  out.noise_cov = psd_repair(lu * mu.cwiseInverse().asDiagonal() * lu.transpose());
  // y-tilde = Lambda C^-1 m = L U diag((1 + mu)/mu) U' L^-1 m
  const Vector whitened_mean = u.transpose() * l_tri.solve(state.gaussian.mean);
  const Vector scale = (mu.array() + 1.0) / mu.array();
  out.values = lu * (scale.asDiagonal() * whitened_mean);
  return out;
}

}  // namespace brpc
