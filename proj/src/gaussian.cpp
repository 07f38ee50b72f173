#include "brpc/gaussian.hpp"

#include <cmath>

namespace brpc {

Matrix kernel_matrix(const SupportSet& a, const SupportSet& b, const KernelConfig& cfg) {
  cfg.validate();
  const auto& pa = a.points();
  const auto& pb = b.points();
  if (!pa.empty() && !pb.empty() && pa.front().size() != pb.front().size())
    throw InvalidInput("kernel_matrix: input dimension mismatch");
  const double inv2l2 = 1.0 / (2.0 * cfg.lengthscale * cfg.lengthscale);
  Matrix k(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      k(i, j) = cfg.signal_variance * std::exp(-(pa[i] - pb[j]).squaredNorm() * inv2l2);
  if (&a == &b) k.diagonal().array() += cfg.effective_jitter();
  return k;
}

GpConditional gp_condition(const SupportSet& prior_support, const SupportSet& new_support,
                           const KernelConfig& cfg) {
  if (prior_support.empty()) throw InvalidInput("gp_condition: empty prior support");
  const Matrix k_pp = kernel_matrix(prior_support, prior_support, cfg);
  const Matrix k_np = kernel_matrix(new_support, prior_support, cfg);
  const Matrix k_nn = kernel_matrix(new_support, new_support, cfg);
  PdFactor prior(k_pp);
  GpConditional out;
  out.mean_map = prior.solve(k_np.transpose()).transpose();
  out.cond_cov = psd_repair(k_nn - out.mean_map * k_np.transpose());
  return out;
}

double gaussian_logpdf(const Vector& y, const Vector& mean, const PdFactor& cov_factor,
                       Eigen::Index dim) {
  static const double log2pi = std::log(2.0 * M_PI);
  const Vector d = y - mean;
  return -0.5 * (dim * log2pi + cov_factor.log_det() + cov_factor.quad_form_inv(d));
}

double gaussian_logpdf(const Vector& y, const GaussianState& state) {
  if (y.size() != state.mean.size()) throw InvalidInput("gaussian_logpdf: dimension mismatch");
  PdFactor f(state.covariance);
  return gaussian_logpdf(y, state.mean, f, state.dim());
}

double GaussianMixture::log_density(const Vector& y) const {
  PdFactor f(shared_cov);
  Vector terms(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double lw = weights[i] > 0.0 ? std::log(weights[i])
                                       : -std::numeric_limits<double>::infinity();
    terms(static_cast<Eigen::Index>(i)) =
        lw + gaussian_logpdf(y, means[i], f, y.size());
  }
  return log_sum_exp(terms);
}

Vector GaussianMixture::mean() const {
  Vector m = Vector::Zero(means.empty() ? 0 : means.front().size());
  for (std::size_t i = 0; i < weights.size(); ++i) m += weights[i] * means[i];
  return m;
}

void GaussianMixture::marginal(Eigen::Index k, std::vector<double>& w, std::vector<double>& mu,
                               double& var) const {
  w = weights;
  mu.resize(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) mu[i] = means[i](k);
  var = shared_cov(k, k);
}

}  // namespace brpc
