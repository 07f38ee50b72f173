#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brpc/baselines.hpp"

using namespace brpc;

namespace {

Batch simulator_batch(double theta, int n, Rng& rng, double noise_sd) {
  SimulatorSpec sim;
  Batch batch;
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    Vector x(1);
    x << rng.uniform();
    batch.inputs.push_back(x);
    Vector tv(1);
    tv << theta;
    y(i) = simulator_eval(sim, batch.inputs.back(), tv) + rng.normal(0.0, noise_sd);
  }
  batch.observations = y;
  return batch;
}

}  // namespace

TEST_CASE("BC: empty window degenerates to the first grid value") {
  BcConfig cfg;
  SimulatorSpec sim;
  BcState state;
  const BcFit fit = bc_window_step(state, cfg, sim);
  CHECK(fit.theta == cfg.theta_lo);
  CHECK(fit.support.empty());

  const SupportSet x_star = SupportSet::from_scalars({0.5});
  const GaussianState pred = bc_predict(fit, x_star, cfg, sim);
  // prior predictive: simulator at theta_lo plus kernel prior + noise
  CHECK(pred.covariance(0, 0) ==
        doctest::Approx(cfg.disc_kernel.signal_variance + cfg.obs_sd * cfg.obs_sd)
            .epsilon(1e-6));
}

TEST_CASE("BC recovers the generating calibration value on clean data") {
  BcConfig cfg;
  SimulatorSpec sim;
  BcState state;
  Rng rng(12);
  const double theta_true = 1.8;
  for (int b = 0; b < 4; ++b) bc_observe(state, simulator_batch(theta_true, 20, rng, 0.05), cfg);

  const BcFit fit = bc_window_step(state, cfg, sim);
  const double grid_step = (cfg.theta_hi - cfg.theta_lo) / (cfg.theta_grid - 1);
  CHECK(std::abs(fit.theta - theta_true) <= 10.0 * grid_step);
}

TEST_CASE("BC window trims to the configured length") {
  BcConfig cfg;
  cfg.window = 30;
  BcState state;
  Rng rng(3);
  for (int b = 0; b < 5; ++b) bc_observe(state, simulator_batch(1.5, 20, rng, 0.1), cfg);
  CHECK(state.window.size() == 30);
}

TEST_CASE("Ward PF tracks a fixed calibration value") {
  WardPfConfig cfg;
  cfg.num_particles = 256;
  SimulatorSpec sim;
  Rng rng(9);
  WardPfState state = ward_pf_init(cfg, 1, rng);
  const double theta_true = 2.1;
  for (int b = 0; b < 10; ++b)
    ward_pf_step(state, simulator_batch(theta_true, 20, rng, 0.1), cfg, sim, rng);
  CHECK(posterior_mean(state.cloud)(0) == doctest::Approx(theta_true).epsilon(0.1));
  CHECK(state.residuals.size() <= static_cast<std::size_t>(cfg.residual_window));
}

TEST_CASE("Ward PF predictive mixture has one component per particle") {
  WardPfConfig cfg;
  cfg.num_particles = 8;
  SimulatorSpec sim;
  Rng rng(5);
  const WardPfState state = ward_pf_init(cfg, 1, rng);
  const SupportSet x_star = SupportSet::from_scalars({0.2, 0.8});
  const GaussianMixture mix = ward_pf_predict(state, x_star, cfg, sim);
  CHECK(mix.means.size() == 8);
  CHECK(mix.shared_cov.rows() == 2);
  // prior GP + observation noise on the diagonal
  CHECK(mix.shared_cov(0, 0) >= cfg.obs_sd * cfg.obs_sd);
}

TEST_CASE("EnKF basis: intercept, linear term, RBFs") {
  EnkfConfig cfg;
  Vector x(1);
  x << 0.4;
  const Vector phi = enkf_basis(cfg, x);
  REQUIRE(phi.size() == cfg.basis_dim());
  CHECK(phi(0) == doctest::Approx(1.0));
  CHECK(phi(1) == doctest::Approx(0.4));
  // RBF centered at 0.4 (center index 2 of 6 -> 2/5) evaluates via the kernel formula
  const double c = 2.0 / 5.0;
  CHECK(phi(4) == doctest::Approx(std::exp(-0.5 * (0.4 - c) * (0.4 - c) /
                                           (cfg.rbf_width * cfg.rbf_width))));
}

TEST_CASE("EnKF shrinks toward the truth on clean data") {
  EnkfConfig cfg;
  cfg.ensemble = 128;
  SimulatorSpec sim;
  Rng rng(30);
  EnkfState state = enkf_init(cfg, 1, rng);
  const double theta_true = 1.4;
  const double err0 = std::abs(enkf_theta_mean(state)(0) - theta_true);
  for (int b = 0; b < 15; ++b)
    enkf_step(state, simulator_batch(theta_true, 20, rng, 0.1), cfg, sim, rng);
  const double err1 = std::abs(enkf_theta_mean(state)(0) - theta_true);
  CHECK(err1 < err0);
  CHECK(err1 < 0.25);
  // members stay inside the admissible range
  for (int i = 0; i < state.members.rows(); ++i) {
    CHECK(state.members(i, 0) >= cfg.theta_lo);
    CHECK(state.members(i, 0) <= cfg.theta_hi);
  }
}

TEST_CASE("EnKF prediction is a single-component mixture") {
  EnkfConfig cfg;
  cfg.ensemble = 16;
  SimulatorSpec sim;
  Rng rng(8);
  const EnkfState state = enkf_init(cfg, 1, rng);
  const GaussianMixture mix = enkf_predict(state, SupportSet::from_scalars({0.3}), cfg, sim);
  CHECK(mix.means.size() == 1);
  CHECK(mix.shared_cov(0, 0) >= cfg.obs_sd * cfg.obs_sd);
}

TEST_CASE("Ward PF lengthscale filtering augments the particle state") {
  WardPfConfig cfg;
  cfg.num_particles = 128;
  cfg.filter_lengthscale = true;
  cfg.ls_lo = 0.2;
  cfg.ls_hi = 3.0;
  SimulatorSpec sim;
  Rng rng(11);
  WardPfState state = ward_pf_init(cfg, 1, rng);
  REQUIRE(state.cloud.particles.front().size() == 2);  // theta plus lengthscale
  for (int b = 0; b < 5; ++b)
    ward_pf_step(state, simulator_batch(1.4, 15, rng, 0.1), cfg, sim, rng);
  for (const Vector& p : state.cloud.particles) {
    CHECK(p(0) >= cfg.theta_lo);
    CHECK(p(0) <= cfg.theta_hi);
    CHECK(p(1) >= cfg.ls_lo);
    CHECK(p(1) <= cfg.ls_hi);
  }
  const GaussianMixture mix = ward_pf_predict(state, SupportSet::from_scalars({0.5}), cfg, sim);
  CHECK(mix.means.size() == static_cast<std::size_t>(cfg.num_particles));
}

TEST_CASE("Ward PF per-particle anchoring is deterministic and stays in range") {
  WardPfConfig cfg;
  cfg.num_particles = 64;
  cfg.per_particle_anchor = true;
  SimulatorSpec sim;
  auto run = [&]() {
    Rng rng(13);
    WardPfState state = ward_pf_init(cfg, 1, rng);
    for (int b = 0; b < 5; ++b)
      ward_pf_step(state, simulator_batch(1.8, 12, rng, 0.15), cfg, sim, rng);
    return posterior_mean(state.cloud)(0);
  };
  const double a = run();
  CHECK(a == run());
  CHECK(a >= cfg.theta_lo);
  CHECK(a <= cfg.theta_hi);
}

TEST_CASE("baseline determinism") {
  WardPfConfig cfg;
  cfg.num_particles = 64;
  SimulatorSpec sim;
  auto run = [&]() {
    Rng rng(77);
    WardPfState state = ward_pf_init(cfg, 1, rng);
    for (int b = 0; b < 5; ++b)
      ward_pf_step(state, simulator_batch(1.6, 10, rng, 0.2), cfg, sim, rng);
    return posterior_mean(state.cloud)(0);
  };
  CHECK(run() == run());
}
