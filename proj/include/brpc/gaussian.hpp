#pragma once

#include <vector>

#include "brpc/linalg.hpp"

namespace brpc {

/// Squared-exponential kernel hyperparameters.
struct KernelConfig {
  double signal_variance = 0.01;
  double lengthscale = 1.0;
  double jitter = -1.0;  // negative -> default 1e-8 * signal_variance

  double effective_jitter() const {
    return jitter >= 0.0 ? jitter : 1e-8 * signal_variance;
  }
  void validate() const {
    if (signal_variance <= 0.0) throw InvalidInput("signal_variance must be > 0");
    if (lengthscale <= 0.0) throw InvalidInput("lengthscale must be > 0");
  }
};

struct GaussianState {
  Vector mean;
  Matrix covariance;

  Eigen::Index dim() const { return mean.size(); }
};

/// Ordered set of input locations. Order is stable; duplicates are allowed
/// only when jitter keeps the self-kernel invertible.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<Vector> points) : points_(std::move(points)) {}

  static SupportSet from_scalars(const std::vector<double>& xs) {
    std::vector<Vector> pts;
    pts.reserve(xs.size());
    for (double x : xs) {
      Vector v(1);
      v(0) = x;
      pts.push_back(v);
    }
    return SupportSet(std::move(pts));
  }

  const std::vector<Vector>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vector& operator[](std::size_t i) const { return points_[i]; }
  void push_back(Vector p) { points_.push_back(std::move(p)); }
  void erase_front(std::size_t n) { points_.erase(points_.begin(), points_.begin() + n); }

  /// Index of a point within tolerance, or -1.
  long find(const Vector& p, double tol = 1e-12) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].size() == p.size() && (points_[i] - p).norm() <= tol)
        return static_cast<long>(i);
    }
    return -1;
  }

 private:
  std::vector<Vector> points_;
};

/// Cross kernel matrix; jitter is added to the diagonal when a and b are the
/// same object.
Matrix kernel_matrix(const SupportSet& a, const SupportSet& b, const KernelConfig& cfg);

struct GpConditional {
  Matrix mean_map;  // |new| x |prior|
  Matrix cond_cov;  // |new| x |new|, symmetrized and PSD-clipped
};

/// GP conditional of values at new_support given values at prior_support.
GpConditional gp_condition(const SupportSet& prior_support, const SupportSet& new_support,
                           const KernelConfig& cfg);

double gaussian_logpdf(const Vector& y, const GaussianState& state);

/// Log-density against a precomputed factor of the covariance.
double gaussian_logpdf(const Vector& y, const Vector& mean, const PdFactor& cov_factor,
                       Eigen::Index dim);

/// Mixture of Gaussians with one component per particle. When all components
/// share a covariance (the shared-discrepancy case) only one factorization is
/// needed, so the covariance is stored once.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Vector> means;
  Matrix shared_cov;

  double log_density(const Vector& y) const;
  Vector mean() const;
  /// Marginal 1-D mixture for observation index k: (weights, means, common variance).
  void marginal(Eigen::Index k, std::vector<double>& w, std::vector<double>& mu,
                double& var) const;
};

}  // namespace brpc
