#include "brpc/engine.hpp"

#include <chrono>
#include <cmath>

namespace brpc {

std::string method_kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::BrpcBocpd: return "b-brpc";
    case MethodKind::BrpcBocpdRra: return "b-brpc-rra";
    case MethodKind::BrpcWcusum: return "c-brpc";
    case MethodKind::BrpcNoRestart: return "brpc-no-restart";
    case MethodKind::Bc: return "bc";
    case MethodKind::WardPf: return "ward-pf";
    case MethodKind::Enkf: return "enkf";
  }
  return "unknown";
}

MethodKind method_kind_from_name(const std::string& name) {
  for (MethodKind k : {MethodKind::BrpcBocpd, MethodKind::BrpcBocpdRra, MethodKind::BrpcWcusum,
                       MethodKind::BrpcNoRestart, MethodKind::Bc, MethodKind::WardPf,
                       MethodKind::Enkf})
    if (method_kind_name(k) == name) return k;
  throw InvalidInput("unknown method kind: " + name);
}

namespace {

// predictive scoring shared by all methods: batch log density, per-
// observation squared error of the predictive mean, and per-observation CRPS
void score_predictive(const GaussianMixture& mix, const Batch& batch, RunLogEntry& entry) {
  entry.pre_log_density = mix.log_density(batch.observations);
  entry.score = -entry.pre_log_density / batch.size();
  entry.obs_count = batch.size();
  std::vector<double> w, mu;
  double var = 0.0;
  for (int k = 0; k < batch.size(); ++k) {
    mix.marginal(k, w, mu, var);
    double mean = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) mean += w[i] * mu[i];
    const double err = batch.observations(k) - mean;
    entry.y_sq_err_sum += err * err;
    entry.y_crps_sum +=
        crps_gaussian_mixture(w, mu, std::sqrt(std::max(var, 0.0)), batch.observations(k));
  }
}

// coordinate-wise ensemble CRPS of a weighted particle cloud, averaged over
// theta dimensions
double cloud_theta_crps(const ParticleCloud& cloud, const Vector& truth) {
  const Eigen::Index dim = truth.size();
  std::vector<double> w(cloud.weights.data(), cloud.weights.data() + cloud.weights.size());
  double total = 0.0;
  std::vector<double> mu(static_cast<std::size_t>(cloud.size()));
  for (Eigen::Index d = 0; d < dim; ++d) {
    for (int i = 0; i < cloud.size(); ++i)
      mu[static_cast<std::size_t>(i)] = cloud.particles[static_cast<std::size_t>(i)](d);
    total += crps_gaussian_mixture(w, mu, 0.0, truth(d));
  }
  return total / static_cast<double>(dim);
}

double point_theta_crps(const Vector& estimate, const Vector& truth) {
  return (estimate - truth).cwiseAbs().mean();
}

GaussianMixture as_mixture(const GaussianState& g) {
  GaussianMixture mix;
  mix.weights = {1.0};
  mix.means = {g.mean};
  mix.shared_cov = g.covariance;
  return mix;
}

DiagRecord make_diag(const PropagatedState& prop, const ResidualBatch& residual,
                     const DiscrepancyState& post) {
  DiagRecord d;
  d.transition = prop.transition;
  d.pre_mean = prop.pre.mean;
  d.pre_cov = prop.pre.covariance;
  d.obs_operator = prop.obs_operator;
  d.noise_cov = prop.noise_cov;
  d.residual = residual.residuals;
  d.post_mean = post.gaussian.mean;
  d.post_cov = post.gaussian.covariance;
  return d;
}

void run_brpc_single(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
                     const SimulatorSpec& sim, std::uint64_t seed, RunLog& log) {
  if (!spec.disc.shared)
    throw InvalidInput(
        "particle-specific discrepancy is exercised through the library API, not the engine");
  Rng init_rng(derive_seed(seed, "init"));
  auto [cloud, disc] = init_restart_state(spec.theta, spec.kernel, spec.disc, spec.variant,
                                          sim.theta_dim(), sim.input_dim(), init_rng);
  Rng filter_rng(derive_seed(seed, "filter"));
  ScoreStats stats;
  if (spec.diagnostics) {
    log.init_mean = disc.gaussian.mean;
    log.init_cov = disc.gaussian.covariance;
  }

  for (const StreamRecord& rec : stream) {
    const Batch batch = rec.batch();
    RunLogEntry entry;
    entry.batch_index = rec.batch_index;
    entry.theta_truth = rec.projected_target;
    entry.is_changepoint = rec.is_changepoint;

    const GaussianMixture mix =
        predictive_law(disc, cloud, batch.support(), sim, spec.disc.residual_noise_sd);
    score_predictive(mix, batch, entry);

    if (spec.kind == MethodKind::BrpcWcusum) {
      entry.restarted = wcusum_step(stats, entry.pre_log_density, batch.size(), spec.wcusum);
      if (entry.restarted) {
        Rng restart_rng(derive_seed(seed, "restart-" + std::to_string(rec.batch_index)));
        std::tie(cloud, disc) = init_restart_state(spec.theta, spec.kernel, spec.disc,
                                                   spec.variant, sim.theta_dim(), sim.input_dim(),
                                                   restart_rng);
      }
    }

    theta_filter_step(cloud, batch, sim, spec.theta, filter_rng);
    const ResidualBatch residual = shared_residual(batch, cloud, sim);
    const PropagatedState prop = discrepancy_step(disc, residual, spec.disc);
    if (spec.diagnostics) log.diagnostics.push_back(make_diag(prop, residual, disc));

    entry.theta_hat = posterior_mean(cloud);
    entry.theta_crps = cloud_theta_crps(cloud, rec.projected_target);
    log.entries.push_back(std::move(entry));
  }
}

void run_brpc_bocpd(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
                    const SimulatorSpec& sim, std::uint64_t seed, RunLog& log) {
  const bool rra = spec.kind == MethodKind::BrpcBocpdRra;

  auto make_expert = [&](int id, int start_time) {
    Expert e;
    e.id = id;
    e.start_time = start_time;
    e.seed = derive_seed(seed, "expert-" + std::to_string(id));
    Rng init_rng(derive_seed(e.seed, "init"));
    std::tie(e.cloud, e.disc) = init_restart_state(spec.theta, spec.kernel, spec.disc,
                                                   spec.variant, sim.theta_dim(), sim.input_dim(),
                                                   init_rng);
    return e;
  };
  auto log_predictive = [&](const Expert& e, const Batch& batch) {
    return predictive_law(e.disc, e.cloud, batch.support(), sim, spec.disc.residual_noise_sd)
        .log_density(batch.observations);
  };
  auto update_expert = [&](Expert& e, const Batch& batch) {
    Rng step_rng(derive_seed(e.seed, "batch-" + std::to_string(log.entries.size())));
    theta_filter_step(e.cloud, batch, sim, spec.theta, step_rng);
    const ResidualBatch residual = shared_residual(batch, e.cloud, sim);
    if (rra) {
      e.segment.push_back(batch);
      e.disc = rra_refit(e.segment, e.cloud, sim, spec.kernel, spec.disc);
    } else {
      discrepancy_step(e.disc, residual, spec.disc);
    }
  };

  BocpdState state;
  {
    Expert first = make_expert(state.next_id++, 0);
    first.is_anchor = true;
    first.log_weight = 0.0;
    state.experts.push_back(std::move(first));
  }

  for (const StreamRecord& rec : stream) {
    const Batch batch = rec.batch();
    RunLogEntry entry;
    entry.batch_index = rec.batch_index;
    entry.theta_truth = rec.projected_target;
    entry.is_changepoint = rec.is_changepoint;

    // predictive scoring from the incumbent anchor, before any update
    {
      const Expert& anchor = state.anchor();
      const GaussianMixture mix = predictive_law(anchor.disc, anchor.cloud, batch.support(), sim,
                                                 spec.disc.residual_noise_sd);
      score_predictive(mix, batch, entry);
    }

    const BocpdStepResult step =
        bocpd_step(state, batch, spec.bocpd, make_expert, log_predictive, update_expert);
    entry.restarted = step.restarted;

    const Expert& anchor = state.anchor();
    entry.theta_hat = posterior_mean(anchor.cloud);
    entry.theta_crps = cloud_theta_crps(anchor.cloud, rec.projected_target);
    log.entries.push_back(std::move(entry));
  }
}

void run_bc(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
            const SimulatorSpec& sim, RunLog& log) {
  BcState state;
  for (const StreamRecord& rec : stream) {
    const Batch batch = rec.batch();
    RunLogEntry entry;
    entry.batch_index = rec.batch_index;
    entry.theta_truth = rec.projected_target;
    entry.is_changepoint = rec.is_changepoint;

    const BcFit fit = bc_window_step(state, spec.bc, sim);
    const GaussianState pred = bc_predict(fit, batch.support(), spec.bc, sim);
    score_predictive(as_mixture(pred), batch, entry);

    entry.theta_hat = Vector::Constant(1, fit.theta);
    entry.theta_crps = point_theta_crps(entry.theta_hat, rec.projected_target);
    bc_observe(state, batch, spec.bc);
    log.entries.push_back(std::move(entry));
  }
}

void run_ward(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
              const SimulatorSpec& sim, std::uint64_t seed, RunLog& log) {
  Rng rng(derive_seed(seed, "ward"));
  WardPfState state = ward_pf_init(spec.ward, sim.theta_dim(), rng);
  for (const StreamRecord& rec : stream) {
    const Batch batch = rec.batch();
    RunLogEntry entry;
    entry.batch_index = rec.batch_index;
    entry.theta_truth = rec.projected_target;
    entry.is_changepoint = rec.is_changepoint;

    const GaussianMixture mix = ward_pf_predict(state, batch.support(), spec.ward, sim);
    score_predictive(mix, batch, entry);

    ward_pf_step(state, batch, spec.ward, sim, rng);
    entry.theta_hat = posterior_mean(state.cloud).head(sim.theta_dim());
    entry.theta_crps = cloud_theta_crps(state.cloud, rec.projected_target);
    log.entries.push_back(std::move(entry));
  }
}

void run_enkf(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
              const SimulatorSpec& sim, std::uint64_t seed, RunLog& log) {
  Rng rng(derive_seed(seed, "enkf"));
  EnkfState state = enkf_init(spec.enkf, sim.theta_dim(), rng);
  for (const StreamRecord& rec : stream) {
    const Batch batch = rec.batch();
    RunLogEntry entry;
    entry.batch_index = rec.batch_index;
    entry.theta_truth = rec.projected_target;
    entry.is_changepoint = rec.is_changepoint;

    const GaussianMixture mix = enkf_predict(state, batch.support(), spec.enkf, sim);
    score_predictive(mix, batch, entry);

    enkf_step(state, batch, spec.enkf, sim, rng);
    entry.theta_hat = enkf_theta_mean(state);
    // ensemble CRPS over member theta values, uniform weights
    {
      ParticleCloud members;
      const int n = static_cast<int>(state.members.rows());
      for (int i = 0; i < n; ++i)
        members.particles.push_back(state.members.row(i).head(state.theta_dim));
      members.weights = Vector::Constant(n, 1.0 / n);
      entry.theta_crps = cloud_theta_crps(members, rec.projected_target);
    }
    log.entries.push_back(std::move(entry));
  }
}

}  // namespace

RunLog run_method_on_stream(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
                            const SimulatorSpec& sim, std::uint64_t seed) {
  RunLog log;
  log.method = spec.id.empty() ? method_kind_name(spec.kind) : spec.id;
  log.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (spec.kind) {
      case MethodKind::BrpcWcusum:
      case MethodKind::BrpcNoRestart:
        run_brpc_single(spec, stream, sim, seed, log);
        break;
      case MethodKind::BrpcBocpd:
      case MethodKind::BrpcBocpdRra:
        run_brpc_bocpd(spec, stream, sim, seed, log);
        break;
      case MethodKind::Bc:
        run_bc(spec, stream, sim, log);
        break;
      case MethodKind::WardPf:
        run_ward(spec, stream, sim, seed, log);
        break;
      case MethodKind::Enkf:
        run_enkf(spec, stream, sim, seed, log);
        break;
    }
  } catch (const std::exception& ex) {
    log.failed = true;
    log.failure = ex.what();
  }
  log.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return log;
}

}  // namespace brpc
