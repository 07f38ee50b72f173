#include "brpc/restart.hpp"

#include <algorithm>
#include <cmath>

namespace brpc {

void BocpdConfig::validate() const {
  if (hazard_scale < 0.0) throw InvalidInput("hazard_scale must be nonnegative");
  if (margin < 1.0) throw InvalidInput("margin rho_B must be >= 1");
  if (cooldown < 0) throw InvalidInput("cooldown must be nonnegative");
  if (max_experts <= 0) throw InvalidInput("max_experts must be positive");
}

void WcusumConfig::validate() const {
  if (window <= 0) throw InvalidInput("window must be positive");
  if (threshold <= 0.0) throw InvalidInput("threshold must be positive");
  if (drift < 0.0) throw InvalidInput("drift allowance must be nonnegative");
  if (sd_floor <= 0.0) throw InvalidInput("sd floor must be positive");
  if (warmup < 0) throw InvalidInput("warmup must be nonnegative");
}

double hazard(int run_length, const BocpdConfig& cfg) {
  const double denom = cfg.hazard_scale + run_length;
  return denom <= 1.0 ? 1.0 : 1.0 / denom;
}

double ScoreStats::running_sd() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(m2_ / (count_ - 1));
}

double ScoreStats::standardize(double score, const WcusumConfig& cfg) const {
  if (count_ == 0) return 0.0;
  const double sd = count_ < 2 ? cfg.sd_floor : std::max(running_sd(), cfg.sd_floor);
  return (score - mean_) / sd;
}

void ScoreStats::push(double score, double standardized, const WcusumConfig& cfg) {
  ++count_;
  const double delta = score - mean_;
  mean_ += delta / count_;
  m2_ += delta * (score - mean_);
  buffer_.push_back(standardized);
  while (static_cast<int>(buffer_.size()) > cfg.window) buffer_.pop_front();
}

void ScoreStats::reset() {
  count_ = 0;
  mean_ = 0.0;
  m2_ = 0.0;
  buffer_.clear();
}

double ScoreStats::statistic(const WcusumConfig& cfg) const {
  double g = 0.0;
  double sum = 0.0;
  const int len = static_cast<int>(buffer_.size());
  for (int m = 1; m <= std::min(len, cfg.window); ++m) {
    sum += buffer_[static_cast<std::size_t>(len - m)];
    const double excess = sum / m - cfg.drift;
    if (excess > 0.0) g = std::max(g, std::sqrt(static_cast<double>(m)) * excess);
  }
  return g;
}

bool wcusum_step(ScoreStats& stats, double pre_log_density, int batch_size,
                 const WcusumConfig& cfg) {
  cfg.validate();
  if (batch_size <= 0) throw InvalidInput("batch_size must be positive");
  const double score = -pre_log_density / batch_size;
  const double standardized = stats.standardize(score, cfg);
  stats.push(score, standardized, cfg);
  if (stats.count() <= cfg.warmup) return false;
  if (stats.statistic(cfg) > cfg.threshold) {
    stats.reset();
    return true;
  }
  return false;
}

std::pair<ParticleCloud, DiscrepancyState> init_restart_state(
    const ThetaFilterConfig& theta_cfg, const KernelConfig& kernel_cfg,
    const DiscrepancyUpdateConfig& disc_cfg, DiscrepancyVariant variant, int theta_dim,
    int input_dim, Rng& rng) {
  ParticleCloud cloud = init_cloud(theta_cfg, theta_dim, rng);
  DiscrepancyState disc = init_discrepancy(variant, kernel_cfg, disc_cfg, input_dim);
  return {std::move(cloud), std::move(disc)};
}

Expert& BocpdState::anchor() {
  for (Expert& e : experts)
    if (e.is_anchor) return e;
  throw InvalidInput("no anchor expert in active set");
}

const Expert& BocpdState::anchor() const {
  for (const Expert& e : experts)
    if (e.is_anchor) return e;
  throw InvalidInput("no anchor expert in active set");
}

BocpdStepResult bocpd_step(
    BocpdState& state, const Batch& batch, const BocpdConfig& cfg,
    const std::function<Expert(int id, int start_time)>& make_expert,
    const std::function<double(const Expert&, const Batch&)>& log_predictive,
    const std::function<void(Expert&, const Batch&)>& update_expert) {
  cfg.validate();
  if (state.experts.empty()) throw InvalidInput("bocpd_step: empty active set");

  const int t = state.batch_index;
  const int anchor_run = t - state.anchor().start_time;
  const double h = hazard(anchor_run, cfg);

  // (a) spawn a fresh expert hypothesizing a restart now
  Expert fresh = make_expert(state.next_id++, t);
  fresh.is_anchor = false;
  state.experts.push_back(std::move(fresh));
  Expert& newcomer = state.experts.back();

  // (b) pre-update predictive densities, strictly before any assimilation
  const std::size_t n = state.experts.size();
  Vector log_pred(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    log_pred(static_cast<Eigen::Index>(i)) = log_predictive(state.experts[i], batch);

  BocpdStepResult result;
  {
    const Expert& anc = state.anchor();
    for (std::size_t i = 0; i < n; ++i)
      if (state.experts[i].id == anc.id)
        result.anchor_pre_log_density = log_pred(static_cast<Eigen::Index>(i));
  }

  // (c) weight update: continuing experts scale by (1-h) w p, the fresh
  // expert enters with h p; normalize in log space
  Vector log_w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Expert& e = state.experts[i];
    if (e.id == newcomer.id)
      log_w(static_cast<Eigen::Index>(i)) = std::log(h) + log_pred(static_cast<Eigen::Index>(i));
    else
      log_w(static_cast<Eigen::Index>(i)) =
          std::log1p(-h) + e.log_weight + log_pred(static_cast<Eigen::Index>(i));
  }
  double lse = log_sum_exp(log_w);
  if (!std::isfinite(lse)) {
    // every predictive density underflowed: fall back to uniform weights
    result.underflow = true;
    log_w.setConstant(-std::log(static_cast<double>(n)));
    lse = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    state.experts[i].log_weight = log_w(static_cast<Eigen::Index>(i)) - lse;

  // (d) hard restart: best post-anchor expert beats the anchor by rho_B
  if (!result.underflow && t - state.last_restart_batch >= cfg.cooldown) {
    Expert& anc = state.anchor();
    Expert* best = nullptr;
    for (Expert& e : state.experts)
      if (e.start_time > anc.start_time && (best == nullptr || e.log_weight > best->log_weight))
        best = &e;
    if (best != nullptr && best->log_weight > std::log(cfg.margin) + anc.log_weight) {
      anc.is_anchor = false;
      best->is_anchor = true;
      state.last_restart_batch = t;
      ++state.restart_count;
      result.restarted = true;
    }
  }

  // (e) prune to max_experts by weight, never the anchor
  if (static_cast<int>(state.experts.size()) > cfg.max_experts) {
    std::sort(state.experts.begin(), state.experts.end(), [](const Expert& a, const Expert& b) {
      if (a.is_anchor != b.is_anchor) return a.is_anchor;
      return a.log_weight > b.log_weight;
    });
    state.experts.resize(static_cast<std::size_t>(cfg.max_experts));
    Vector kept(static_cast<Eigen::Index>(state.experts.size()));
    for (std::size_t i = 0; i < state.experts.size(); ++i)
      kept(static_cast<Eigen::Index>(i)) = state.experts[i].log_weight;
    const double norm = log_sum_exp(kept);
    for (Expert& e : state.experts) e.log_weight -= norm;
  }

  // (f) all retained experts assimilate the batch
  for (Expert& e : state.experts) update_expert(e, batch);

  result.anchor_id = state.anchor().id;
  ++state.batch_index;
  return result;
}

double expected_restart_odds(const Vector& mu_c, const Matrix& sigma_c, const Vector& mu_n,
                             const Matrix& sigma_n, const Vector& mu_star,
                             const Matrix& sigma_star, double hazard_prob, double prev_weight) {
  if (hazard_prob <= 0.0 || hazard_prob >= 1.0) throw InvalidInput("hazard must be in (0,1)");
  if (prev_weight <= 0.0) throw InvalidInput("prev_weight must be positive");
  const PdFactor c_f(sigma_c);
  const PdFactor n_f(sigma_n);
  const Eigen::Index d = mu_c.size();

  const double prior_term = std::log(hazard_prob / ((1.0 - hazard_prob) * prev_weight));
  const double log_det_ratio = c_f.log_det() - n_f.log_det();
  const double trace_term =
      ((c_f.inverse(d) - n_f.inverse(d)) * sigma_star).trace();
  const double quad_c = c_f.quad_form_inv(mu_star - mu_c);
  const double quad_n = n_f.quad_form_inv(mu_star - mu_n);
  return prior_term + 0.5 * (log_det_ratio + trace_term + quad_c - quad_n);
}

}  // namespace brpc
