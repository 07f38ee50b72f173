#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brpc/gaussian.hpp"

using namespace brpc;

namespace {

double sqexp(double a, double b, const KernelConfig& k) {
  const double d = (a - b) / k.lengthscale;
  return k.signal_variance * std::exp(-0.5 * d * d);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("kernel_matrix matches the scalar formula, jitter only on self-kernels") {
  KernelConfig k;
  k.signal_variance = 0.7;
  k.lengthscale = 0.4;
  k.jitter = 1e-6;
  const SupportSet a = SupportSet::from_scalars({0.1, 0.5, 0.9});
  const SupportSet b = SupportSet::from_scalars({0.2, 0.8});

  const Matrix kab = kernel_matrix(a, b, k);
  REQUIRE(kab.rows() == 3);
  REQUIRE(kab.cols() == 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(kab(i, j) == doctest::Approx(sqexp(a[i](0), b[j](0), k)).epsilon(1e-14));

  const Matrix kaa = kernel_matrix(a, a, k);
  CHECK(kaa(0, 0) == doctest::Approx(0.7 + 1e-6));
  CHECK(kaa(0, 1) == doctest::Approx(sqexp(0.1, 0.5, k)));
  CHECK((kaa - kaa.transpose()).norm() == 0.0);
}

TEST_CASE("gp_condition reproduces the two-point Schur-complement oracle") {
  KernelConfig k;
  k.signal_variance = 1.3;
  k.lengthscale = 0.6;
  k.jitter = 0.0;
  const SupportSet prior = SupportSet::from_scalars({0.0, 1.0});
  const SupportSet fresh = SupportSet::from_scalars({0.4});

  // oracle: hand-rolled 2x2 inverse
  const double k00 = sqexp(0.0, 0.0, k), k01 = sqexp(0.0, 1.0, k), k11 = sqexp(1.0, 1.0, k);
  const double det = k00 * k11 - k01 * k01;
  const double s0 = sqexp(0.4, 0.0, k), s1 = sqexp(0.4, 1.0, k);
  const double g0 = (s0 * k11 - s1 * k01) / det;
  const double g1 = (s1 * k00 - s0 * k01) / det;
  const double cond_var = sqexp(0.4, 0.4, k) - (g0 * s0 + g1 * s1);

  const GpConditional c = gp_condition(prior, fresh, k);
  REQUIRE(c.mean_map.rows() == 1);
  REQUIRE(c.mean_map.cols() == 2);
  CHECK(c.mean_map(0, 0) == doctest::Approx(g0).epsilon(1e-8));
  CHECK(c.mean_map(0, 1) == doctest::Approx(g1).epsilon(1e-8));
  CHECK(c.cond_cov(0, 0) == doctest::Approx(cond_var).epsilon(1e-6));
}

TEST_CASE("conditioning at a prior point is the identity") {
  KernelConfig k;
  const SupportSet prior = SupportSet::from_scalars({0.2, 0.7, 0.9});
  const SupportSet fresh = SupportSet::from_scalars({0.7});
  const GpConditional c = gp_condition(prior, fresh, k);
  CHECK(c.mean_map(0, 0) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(c.mean_map(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(c.cond_cov(0, 0) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("gaussian_logpdf matches the explicit bivariate density") {
  GaussianState g;
  g.mean = Vector(2);
  g.mean << 0.5, -0.2;
  g.covariance = Matrix(2, 2);
  g.covariance << 1.2, 0.3, 0.3, 0.8;
  Vector y(2);
  y << 1.0, 0.1;

  const double det = 1.2 * 0.8 - 0.3 * 0.3;
  const Vector d = y - g.mean;
  const double quad =
      (d(0) * d(0) * 0.8 - 2.0 * d(0) * d(1) * 0.3 + d(1) * d(1) * 1.2) / det;
  const double expect = -0.5 * (2.0 * std::log(2.0 * kPi) + std::log(det) + quad);
  CHECK(gaussian_logpdf(y, g) == doctest::Approx(expect).epsilon(1e-12));

  const PdFactor f(g.covariance);
  CHECK(gaussian_logpdf(y, g.mean, f, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mixture log density is the weighted log-sum-exp of its components") {
  GaussianMixture mix;
  mix.weights = {0.3, 0.7};
  Vector m1(1), m2(1);
  m1 << 0.0;
  m2 << 1.0;
  mix.means = {m1, m2};
  mix.shared_cov = Matrix::Constant(1, 1, 0.25);

  Vector y(1);
  y << 0.4;
  auto comp = [&](double mu) {
    return std::exp(-0.5 * (y(0) - mu) * (y(0) - mu) / 0.25) / std::sqrt(2.0 * kPi * 0.25);
  };
  CHECK(mix.log_density(y) ==
        doctest::Approx(std::log(0.3 * comp(0.0) + 0.7 * comp(1.0))).epsilon(1e-12));
  CHECK(mix.mean()(0) == doctest::Approx(0.7));

  std::vector<double> w, mu;
  double var = 0.0;
  mix.marginal(0, w, mu, var);
  CHECK(var == doctest::Approx(0.25));
  CHECK(mu[1] == doctest::Approx(1.0));
}

TEST_CASE("SupportSet find and pruning") {
  SupportSet s = SupportSet::from_scalars({0.1, 0.2, 0.3});
  Vector p(1);
  p << 0.2;
  CHECK(s.find(p) == 1);
  p << 0.25;
  CHECK(s.find(p) == -1);
  s.erase_front(2);
  REQUIRE(s.size() == 1);
  CHECK(s[0](0) == doctest::Approx(0.3));
}
