#include "brpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace brpc {

std::vector<int> RunLog::restart_batches() const {
  std::vector<int> out;
  for (const auto& e : entries)
    if (e.restarted) out.push_back(e.batch_index);
  return out;
}

std::vector<int> RunLog::changepoint_batches() const {
  std::vector<int> out;
  for (const auto& e : entries)
    if (e.is_changepoint) out.push_back(e.batch_index);
  return out;
}

double theta_rmse(const std::vector<Vector>& estimates, const std::vector<Vector>& truth) {
  if (estimates.size() != truth.size() || estimates.empty())
    throw InvalidInput("theta_rmse: length mismatch");
  double ss = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i)
    ss += (estimates[i] - truth[i]).squaredNorm();
  return std::sqrt(ss / static_cast<double>(estimates.size()));
}

double theta_rmse(const RunLog& log) {
  std::vector<Vector> est, truth;
  for (const auto& e : log.entries) {
    est.push_back(e.theta_hat);
    truth.push_back(e.theta_truth);
  }
  return theta_rmse(est, truth);
}

double y_rmse(const RunLog& log) {
  double ss = 0.0;
  long n = 0;
  for (const auto& e : log.entries) {
    ss += e.y_sq_err_sum;
    n += e.obs_count;
  }
  if (n == 0) throw InvalidInput("y_rmse: empty log");
  return std::sqrt(ss / static_cast<double>(n));
}

double mean_y_crps(const RunLog& log) {
  double s = 0.0;
  long n = 0;
  for (const auto& e : log.entries) {
    s += e.y_crps_sum;
    n += e.obs_count;
  }
  if (n == 0) throw InvalidInput("mean_y_crps: empty log");
  return s / static_cast<double>(n);
}

double mean_theta_crps(const RunLog& log) {
  if (log.entries.empty()) throw InvalidInput("mean_theta_crps: empty log");
  double s = 0.0;
  for (const auto& e : log.entries) s += e.theta_crps;
  return s / static_cast<double>(log.entries.size());
}

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// E|X| for X ~ N(mu, sigma^2); the CRPS pairwise kernel.
double abs_gaussian_mean(double mu, double sigma) {
  if (sigma <= 0.0) return std::abs(mu);
  const double z = mu / sigma;
  return mu * (2.0 * std_normal_cdf(z) - 1.0) + 2.0 * sigma * std_normal_pdf(z);
}

}  // namespace

double crps_gaussian_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                             const std::vector<double>& sds, double y) {
  const std::size_t n = weights.size();
  if (means.size() != n || sds.size() != n || n == 0)
    throw InvalidInput("crps: component count mismatch");
  double first = 0.0;
  for (std::size_t i = 0; i < n; ++i) first += weights[i] * abs_gaussian_mean(y - means[i], sds[i]);
  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      second += weights[i] * weights[j] *
                abs_gaussian_mean(means[i] - means[j],
                                  std::sqrt(sds[i] * sds[i] + sds[j] * sds[j]));
  return first - 0.5 * second;
}

void thin_mixture(std::vector<double>& weights, std::vector<double>& means, int max_components) {
  const std::size_t n = weights.size();
  if (n == 0 || means.size() != n) throw InvalidInput("thin_mixture: bad mixture");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });

  // merge exact duplicates first
  std::vector<double> w, mu;
  for (std::size_t idx : order) {
    if (!mu.empty() && std::abs(means[idx] - mu.back()) <= 1e-12) {
      w.back() += weights[idx];
    } else {
      w.push_back(weights[idx]);
      mu.push_back(means[idx]);
    }
  }
  // bin down to max_components by cumulative weight
  if (static_cast<int>(w.size()) > max_components) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> bw, bmu;
    double acc_w = 0.0, acc_wm = 0.0, boundary = total / max_components;
    double cum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc_w += w[i];
      acc_wm += w[i] * mu[i];
      cum += w[i];
      if (cum >= boundary - 1e-15 || i + 1 == w.size()) {
        if (acc_w > 0.0) {
          bw.push_back(acc_w);
          bmu.push_back(acc_wm / acc_w);
        }
        acc_w = acc_wm = 0.0;
        boundary = std::min(total, boundary + total / max_components);
      }
    }
    w = std::move(bw);
    mu = std::move(bmu);
  }
  weights = std::move(w);
  means = std::move(mu);
}

double crps_gaussian_mixture(const std::vector<double>& weights, const std::vector<double>& means,
                             double sd, double y, int max_components) {
  std::vector<double> w = weights, mu = means;
  thin_mixture(w, mu, max_components);
  return crps_gaussian_mixture(w, mu, std::vector<double>(w.size(), sd), y);
}

EventMetrics event_metrics(std::vector<int> restarts, std::vector<int> changepoints, int tol) {
  if (tol < 0) throw InvalidInput("event_metrics: negative tolerance");
  std::sort(restarts.begin(), restarts.end());
  std::sort(changepoints.begin(), changepoints.end());

  EventMetrics out;
  out.restarts = static_cast<int>(restarts.size());
  out.changepoints = static_cast<int>(changepoints.size());

  std::vector<bool> used(restarts.size(), false);
  double delay_sum = 0.0;
  for (int cp : changepoints) {
    for (std::size_t i = 0; i < restarts.size(); ++i) {
      if (used[i]) continue;
      if (restarts[i] < cp) continue;         // early detections never count
      if (restarts[i] > cp + tol) break;
      used[i] = true;
      ++out.matched;
      delay_sum += restarts[i] - cp;
      break;
    }
  }
  out.recall = out.changepoints == 0 ? 1.0
                                     : static_cast<double>(out.matched) / out.changepoints;
  if (out.restarts == 0 && out.changepoints == 0) {
    out.has_precision = false;
  } else if (out.restarts == 0) {
    out.precision = 0.0;
  } else {
    out.precision = static_cast<double>(out.matched) / out.restarts;
  }
  const double denom = out.precision + out.recall;
  out.f1 = (out.has_precision && denom > 0.0) ? 2.0 * out.precision * out.recall / denom : 0.0;
  if (out.matched > 0) {
    out.mean_delay = delay_sum / out.matched;
  } else {
    out.has_delay = false;
  }
  return out;
}

namespace {

// largest generalized eigenvalue of A' M_new A against M_old, where both
// metrics are supplied as covariances (M = cov^{-1}):
//   lambda_max( cov_old^{1/2} A' cov_new^{-1} A cov_old^{1/2} )
double contraction_factor(const Matrix& transition, const Matrix& cov_old,
                          const Matrix& cov_new) {
  if (cov_old.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es_old(cov_old);
  if (es_old.info() != Eigen::Success) throw NumericalError("contraction_factor: eigensolver");
  const Matrix sqrt_old = es_old.operatorSqrt();
  const PdFactor new_f(cov_new +
                       1e-14 * std::max(cov_new.trace(), 1.0) *
                           Matrix::Identity(cov_new.rows(), cov_new.cols()));
  const Matrix inner = transition * sqrt_old;
  Matrix b = inner.transpose() * new_f.solve(inner);
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

GammaSummary gamma_replay(const RunLog& log) {
  if (log.diagnostics.empty()) throw InvalidInput("gamma_replay: no recorded diagnostics");
  GammaSummary out;
  std::vector<double> priors, posts;
  for (std::size_t t = 1; t < log.diagnostics.size(); ++t) {
    const DiagRecord& prev = log.diagnostics[t - 1];
    const DiagRecord& cur = log.diagnostics[t];
    if (cur.transition.cols() != prev.pre_cov.rows()) continue;  // restart boundary
    GammaPoint p;
    p.batch_index = static_cast<int>(t);
    p.gamma_prior = contraction_factor(cur.transition, prev.pre_cov, cur.pre_cov);
    p.gamma_post = contraction_factor(cur.transition, prev.post_cov, cur.post_cov);
    out.points.push_back(p);
    priors.push_back(p.gamma_prior);
    posts.push_back(p.gamma_post);
  }
  if (out.points.empty()) throw InvalidInput("gamma_replay: fewer than two usable records");
  out.median_prior = median_of(priors);
  out.max_prior = *std::max_element(priors.begin(), priors.end());
  out.median_post = median_of(posts);
  out.max_post = *std::max_element(posts.begin(), posts.end());
  int le = 0;
  for (double g : priors)
    if (g <= 1.0 + 1e-9) ++le;
  out.frac_prior_le_1 = static_cast<double>(le) / priors.size();
  return out;
}

TrackingBoundResult tracking_bound_check(const RunLog& log, const std::vector<Vector>& reference,
                                         double gamma, double eta_delta) {
  if (gamma < 0.0 || gamma >= 1.0) throw InvalidInput("tracking bound requires gamma in [0,1)");
  if (eta_delta <= 0.0) throw InvalidInput("eta_delta must be positive");
  const std::size_t T = log.diagnostics.size();
  if (reference.size() != T + 1)
    throw InvalidInput("reference path must have one entry per batch plus the initial state");

  TrackingBoundResult out;

  // rhs initialization term: (1/2 eta) ||v_0 - m_0||^2_{M_0}, M_0 = C_0^{-1}
  if (log.init_cov.rows() > 0) {
    const PdFactor init_f(log.init_cov);
    out.rhs += init_f.quad_form_inv(reference[0] - log.init_mean) / (2.0 * eta_delta);
  } else if (reference[0].size() != 0) {
    throw InvalidInput("reference[0] must be empty for an empty initial support");
  }

  Matrix prev_cov = log.init_cov;  // metric carrier for the empirical gamma
  Vector unused;
  for (std::size_t t = 0; t < T; ++t) {
    const DiagRecord& d = log.diagnostics[t];
    const PdFactor m_f(d.pre_cov);
    const PdFactor r_f(d.noise_cov);

    auto loss = [&](const Vector& u) {
      const Vector gap = d.residual - d.obs_operator * u;
      return 0.5 * gap.dot(r_f.solve(gap));
    };
    out.lhs += loss(d.post_mean) - loss(reference[t + 1]);

    const Vector path_step = reference[t + 1] - d.transition * reference[t];
    out.rhs += m_f.quad_form_inv(path_step) / (2.0 * eta_delta * (1.0 - gamma));

    if (prev_cov.rows() == d.transition.cols() && prev_cov.rows() > 0)
      out.max_empirical_gamma =
          std::max(out.max_empirical_gamma, contraction_factor(d.transition, prev_cov, d.pre_cov));
    prev_cov = d.pre_cov;
  }
  out.holds = out.lhs <= out.rhs + 1e-9 * (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace brpc
