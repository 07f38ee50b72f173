#pragma once

#include <optional>
#include <string>

#include "brpc/gaussian.hpp"

namespace brpc {

/// Per-batch record written by the prequential loop.
struct RunLogEntry {
  int batch_index = 0;
  Vector theta_hat;
  Vector theta_truth;
  double pre_log_density = 0.0;  // batch predictive log density, pre-update
  double score = 0.0;            // s_t = -pre_log_density / K_t
  bool restarted = false;
  bool is_changepoint = false;
  double y_sq_err_sum = 0.0;  // sum over batch of squared predictive-mean error
  double y_crps_sum = 0.0;    // sum over batch of per-observation CRPS
  double theta_crps = 0.0;    // ensemble CRPS of the particle cloud vs truth
  int obs_count = 0;
};

/// Propagation tuple recorded when diagnostics are enabled (Theorem-1 and
/// gamma replay): pre-update (a_t, P_t), transition A_t, observation pieces
/// (G_t, R_t, r_t) and the posterior (m_t, C_t).
struct DiagRecord {
  Matrix transition;     // A_t
  Vector pre_mean;       // a_t
  Matrix pre_cov;        // P_t, so M_t = P_t^{-1}
  Matrix obs_operator;   // G_t
  Matrix noise_cov;      // R_t
  Vector residual;       // r_t
  Vector post_mean;      // m_t
  Matrix post_cov;       // C_t
};

struct RunLog {
  std::string scenario;
  std::string method;
  std::uint64_t seed = 0;
  int seed_index = 0;
  double runtime_s = 0.0;
  bool failed = false;
  std::string failure;
  std::vector<RunLogEntry> entries;

  // diagnostics (optional): initial discrepancy state and per-batch tuples
  Vector init_mean;
  Matrix init_cov;
  std::vector<DiagRecord> diagnostics;

  std::vector<int> restart_batches() const;
  std::vector<int> changepoint_batches() const;
  int restart_count() const { return static_cast<int>(restart_batches().size()); }
};

// --- scalar metrics ----------------------------------------------------------

/// sqrt(mean_t ||theta_hat_t - truth_t||^2) (Euclidean norm per batch).
double theta_rmse(const RunLog& log);
double theta_rmse(const std::vector<Vector>& estimates, const std::vector<Vector>& truth);

double y_rmse(const RunLog& log);
double mean_y_crps(const RunLog& log);
double mean_theta_crps(const RunLog& log);

/// CRPS of a 1-D Gaussian mixture by the pairwise closed form. Component sd
/// may be zero (ensemble CRPS).
double crps_gaussian_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                             const std::vector<double>& sds, double y);

/// Shared-sd convenience overload with deterministic component thinning for
/// large mixtures.
double crps_gaussian_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                             double sd, double y, int max_components = 256);

/// Merge duplicate means (1e-12) and bin down to max_components, preserving
/// total weight and the weighted mean of each bin.
void thin_mixture(std::vector<double>& weights, std::vector<double>& means, int max_components);

// --- event metrics -----------------------------------------------------------

struct EventMetrics {
  double precision = 0.0;  // missing reported via has_precision
  double recall = 0.0;
  double f1 = 0.0;
  double mean_delay = 0.0;
  int matched = 0;
  int restarts = 0;
  int changepoints = 0;
  bool has_precision = true;
  bool has_delay = true;
};

/// Greedy one-to-one matching: each changepoint takes the earliest unmatched
/// restart in [cp, cp+tol]. Early restarts are never matched.
EventMetrics event_metrics(std::vector<int> restarts, std::vector<int> changepoints, int tol = 2);

// --- replay diagnostics --------------------------------------------------------

struct GammaPoint {
  int batch_index = 0;
  double gamma_prior = 0.0;
  double gamma_post = 0.0;
};

struct GammaSummary {
  std::vector<GammaPoint> points;
  double median_prior = 0.0;
  double max_prior = 0.0;
  double frac_prior_le_1 = 0.0;
  double median_post = 0.0;
  double max_post = 0.0;
};

/// Empirical Assumption-1 analogue: per-batch largest generalized eigenvalue
/// of A_t' M_t A_t against M_{t-1}, with M = P^{-1} (prior) and M = C^{-1}
/// (post).
GammaSummary gamma_replay(const RunLog& log);

struct TrackingBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double max_empirical_gamma = 0.0;
};

/// Evaluate both sides of the tracking bound for a reference path
/// v_0, ..., v_T (v[t] lives on the support of batch t's pre-state; v[0] on
/// the initial support).
TrackingBoundResult tracking_bound_check(const RunLog& log, const std::vector<Vector>& reference,
                                         double gamma, double eta_delta);

}  // namespace brpc
