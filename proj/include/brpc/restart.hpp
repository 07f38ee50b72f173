#pragma once

#include <deque>
#include <functional>

#include "brpc/discrepancy.hpp"

namespace brpc {

/// One BOCPD expert: a full BRPC state hypothesizing a restart at start_time.
struct Expert {
  int id = 0;
  int start_time = 0;           // batch index of the hypothesized restart
  ParticleCloud cloud;
  DiscrepancyState disc;
  double log_weight = 0.0;      // normalized in log space over the active set
  bool is_anchor = false;
  std::uint64_t seed = 0;       // per-expert RNG substream
  std::vector<Batch> segment;   // batches since start_time (RRA refits)
};

struct BocpdConfig {
  double hazard_scale = 200.0;  // h(r) = 1 / (hazard_scale + r)
  double margin = 1.0;          // rho_B >= 1
  int cooldown = 2;             // batches between hard restarts
  int max_experts = 5;

  void validate() const;
};

struct WcusumConfig {
  int window = 4;
  double threshold = 0.25;   // h_C
  double drift = 0.25;       // kappa
  double sd_floor = 0.25;    // sigma_min
  int warmup = 3;            // no restarts this many batches into a segment

  void validate() const;
};

/// Running score statistics since the most recent restart.
class ScoreStats {
 public:
  /// Standardized score using the PREVIOUS running stats (sd floored).
  double standardize(double score, const WcusumConfig& cfg) const;
  void push(double score, double standardized, const WcusumConfig& cfg);
  void reset();

  double statistic(const WcusumConfig& cfg) const;  // current G
  int count() const { return count_; }
  double running_mean() const { return mean_; }
  double running_sd() const;
  const std::deque<double>& buffer() const { return buffer_; }

 private:
  int count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::deque<double> buffer_;  // standardized scores, most recent last
};

double hazard(int run_length, const BocpdConfig& cfg);

/// Uniform particle cloud over the admissible range plus a fresh zero-mean
/// discrepancy prior (variant-dependent support).
std::pair<ParticleCloud, DiscrepancyState> init_restart_state(
    const ThetaFilterConfig& theta_cfg, const KernelConfig& kernel_cfg,
    const DiscrepancyUpdateConfig& disc_cfg, DiscrepancyVariant variant, int theta_dim,
    int input_dim, Rng& rng);

struct BocpdState {
  std::vector<Expert> experts;
  int next_id = 0;
  int batch_index = 0;              // index of the next batch to process
  int last_restart_batch = -1 << 30;
  int restart_count = 0;

  Expert& anchor();
  const Expert& anchor() const;
};

struct BocpdStepResult {
  bool restarted = false;
  bool underflow = false;
  int anchor_id = -1;
  double anchor_pre_log_density = 0.0;
};

/// One BOCPD step. The caller supplies how to build a fresh expert, evaluate
/// a pre-update log predictive density, and assimilate the batch into an
/// expert; the step owns spawning, weighting, the hard-restart rule, and
/// pruning.
BocpdStepResult bocpd_step(
    BocpdState& state, const Batch& batch, const BocpdConfig& cfg,
    const std::function<Expert(int id, int start_time)>& make_expert,
    const std::function<double(const Expert&, const Batch&)>& log_predictive,
    const std::function<void(Expert&, const Batch&)>& update_expert);

/// One wCUSUM monitor step on the pre-update batch log density. On restart
/// the stats are reset and the score is NOT recorded: the caller resets the
/// BRPC state before assimilating, and the next batch starts a fresh buffer.
bool wcusum_step(ScoreStats& stats, double pre_log_density, int batch_size,
                 const WcusumConfig& cfg);

/// Closed-form expected one-step log restart odds when Y ~ N(mu_star,
/// Sigma_star), continuing expert predicts N(mu_c, Sigma_c) and a fresh
/// expert predicts N(mu_n, Sigma_n). Diagnostic only.
double expected_restart_odds(const Vector& mu_c, const Matrix& sigma_c, const Vector& mu_n,
                             const Matrix& sigma_n, const Vector& mu_star,
                             const Matrix& sigma_star, double hazard_prob, double prev_weight);

}  // namespace brpc
