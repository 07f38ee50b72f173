#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brpc/restart.hpp"

using namespace brpc;

namespace {

Batch dummy_batch() {
  Batch batch;
  Vector x(1);
  x << 0.5;
  batch.inputs = {x};
  batch.observations = Vector::Constant(1, 0.0);
  return batch;
}

/// A BOCPD harness whose "experts" are pure bookkeeping: the caller scripts
/// the per-expert log predictive densities by expert id.
struct ToyBank {
  BocpdState state;
  std::map<int, double> density;
  std::vector<int> updated;

  BocpdStepResult step(const BocpdConfig& cfg) {
    updated.clear();
    return bocpd_step(
        state, dummy_batch(), cfg,
        [&](int id, int start_time) {
          Expert e;
          e.id = id;
          e.start_time = start_time;
          return e;
        },
        [&](const Expert& e, const Batch&) {
          auto it = density.find(e.id);
          return it == density.end() ? 0.0 : it->second;
        },
        [&](Expert& e, const Batch&) { updated.push_back(e.id); });
  }
};

}  // namespace

TEST_CASE("hazard formula") {
  BocpdConfig cfg;
  CHECK(hazard(0, cfg) == doctest::Approx(1.0 / 200.0));
  CHECK(hazard(50, cfg) == doctest::Approx(1.0 / 250.0));
  cfg.hazard_scale = 0.0;
  CHECK(hazard(0, cfg) == doctest::Approx(1.0));  // capped at 1
}

TEST_CASE("first BOCPD step installs the anchor, weights follow Bayes") {
  ToyBank bank;
  BocpdConfig cfg;
  // seed the bank with an anchor at time 0
  Expert anchor;
  anchor.id = 0;
  anchor.is_anchor = true;
  anchor.log_weight = 0.0;
  bank.state.experts.push_back(anchor);
  bank.state.next_id = 1;

  bank.density[0] = -1.0;  // anchor predictive
  bank.density[1] = -1.0;  // fresh expert spawned this step
  const BocpdStepResult res = bank.step(cfg);
  CHECK_FALSE(res.restarted);
  REQUIRE(bank.state.experts.size() == 2);

  // oracle: continuing w = (1-h) * 1 * p, fresh w = h * p_new, normalized
  const double h = 1.0 / 200.0;
  const double wc = (1.0 - h) * std::exp(-1.0);
  const double wn = h * std::exp(-1.0);
  CHECK(std::exp(bank.state.experts[0].log_weight) ==
        doctest::Approx(wc / (wc + wn)).epsilon(1e-12));
  CHECK(std::exp(bank.state.experts[1].log_weight) ==
        doctest::Approx(wn / (wc + wn)).epsilon(1e-12));
  // every retained expert is assimilated
  CHECK(bank.updated.size() == 2);
}

TEST_CASE("a dominant challenger triggers a hard restart outside the cooldown") {
  ToyBank bank;
  BocpdConfig cfg;
  cfg.cooldown = 1;
  Expert anchor;
  anchor.id = 0;
  anchor.is_anchor = true;
  bank.state.experts.push_back(anchor);
  bank.state.next_id = 1;

  // step 1: spawn expert 1; anchor still fine
  bank.density[0] = -1.0;
  bank.density[1] = -1.0;
  CHECK_FALSE(bank.step(cfg).restarted);

  // step 2: the anchor collapses, the challenger dominates
  bank.density[0] = -80.0;
  bank.density[1] = -1.0;
  bank.density[2] = -1.0;
  const BocpdStepResult res = bank.step(cfg);
  CHECK(res.restarted);
  CHECK(bank.state.restart_count == 1);
  CHECK(bank.state.anchor().start_time > 0);
  CHECK(bank.state.anchor().is_anchor);
}

TEST_CASE("cooldown suppresses back-to-back restarts") {
  ToyBank bank;
  BocpdConfig cfg;
  cfg.cooldown = 100;
  Expert anchor;
  anchor.id = 0;
  anchor.is_anchor = true;
  bank.state.experts.push_back(anchor);
  bank.state.next_id = 1;
  bank.state.last_restart_batch = 0;

  bank.density[0] = -80.0;
  bank.density[1] = -1.0;
  CHECK_FALSE(bank.step(cfg).restarted);
}

TEST_CASE("pruning keeps the anchor and the heaviest challengers") {
  ToyBank bank;
  BocpdConfig cfg;
  cfg.max_experts = 3;
  Expert anchor;
  anchor.id = 0;
  anchor.is_anchor = true;
  bank.state.experts.push_back(anchor);
  bank.state.next_id = 1;
  bank.state.last_restart_batch = 0;  // large cooldown prevents restarts
  cfg.cooldown = 1 << 20;

  for (int step = 0; step < 6; ++step) {
    for (int id = 0; id < bank.state.next_id + 1; ++id) bank.density[id] = -1.0;
    bank.density[0] = -0.5;  // keep the anchor competitive
    bank.step(cfg);
    CHECK(bank.state.experts.size() <= 3);
    bool has_anchor = false;
    for (const auto& e : bank.state.experts) has_anchor |= e.is_anchor;
    CHECK(has_anchor);
  }
}

TEST_CASE("underflow flags and equalizes without restarting") {
  ToyBank bank;
  BocpdConfig cfg;
  Expert anchor;
  anchor.id = 0;
  anchor.is_anchor = true;
  bank.state.experts.push_back(anchor);
  bank.state.next_id = 1;
  bank.density[0] = -std::numeric_limits<double>::infinity();
  bank.density[1] = -std::numeric_limits<double>::infinity();
  const BocpdStepResult res = bank.step(cfg);
  CHECK(res.underflow);
  CHECK_FALSE(res.restarted);
  for (const auto& e : bank.state.experts)
    CHECK(std::exp(e.log_weight) ==
          doctest::Approx(1.0 / static_cast<double>(bank.state.experts.size())));
}

TEST_CASE("score stats: standardization rules at low counts") {
  WcusumConfig cfg;
  ScoreStats stats;
  // empty stats: standardized score is 0
  CHECK(stats.standardize(3.7, cfg) == 0.0);
  stats.push(3.7, 0.0, cfg);
  // one sample: sd floored
  CHECK(stats.standardize(4.2, cfg) == doctest::Approx((4.2 - 3.7) / cfg.sd_floor));
}

TEST_CASE("score stats: floored and empirical sd") {
  WcusumConfig cfg;
  cfg.sd_floor = 0.25;
  ScoreStats stats;
  for (double s : {1.0, 1.0, 1.0, 1.0}) stats.push(s, stats.standardize(s, cfg), cfg);
  // zero empirical sd -> floor
  CHECK(stats.standardize(1.5, cfg) == doctest::Approx(0.5 / 0.25));

  ScoreStats wide;
  for (double s : {0.0, 10.0, 0.0, 10.0}) wide.push(s, wide.standardize(s, cfg), cfg);
  const double sd = std::sqrt((2.0 * 25.0 * 2.0) / 3.0);  // sample sd of {0,10,0,10}
  CHECK(wide.running_sd() == doctest::Approx(sd));
}

TEST_CASE("wCUSUM statistic matches the window-limited formula") {
  WcusumConfig cfg;
  cfg.window = 3;
  cfg.drift = 0.25;
  ScoreStats stats;
  // hand-load standardized scores 1.0, 2.0 (bypassing standardization)
  stats.push(0.0, 1.0, cfg);
  stats.push(0.0, 2.0, cfg);
  // G = max over m in {1,2}: sqrt(m) * (mean of last m - drift)+
  const double g1 = std::sqrt(1.0) * (2.0 - 0.25);
  const double g2 = std::sqrt(2.0) * (1.5 - 0.25);
  CHECK(stats.statistic(cfg) == doctest::Approx(std::max(g1, g2)));
}

TEST_CASE("wCUSUM step: warmup, detection, reset") {
  WcusumConfig cfg;
  cfg.window = 4;
  cfg.threshold = 1.0;
  cfg.warmup = 3;
  ScoreStats stats;
  const int k = 20;
  // calm scores during warmup and after (score = -logp / K)
  for (int t = 0; t < 6; ++t) CHECK_FALSE(wcusum_step(stats, -20.0, k, cfg));
  // a large surprise drives the statistic over the threshold
  bool fired = false;
  for (int t = 0; t < 4 && !fired; ++t) fired = wcusum_step(stats, -2000.0, k, cfg);
  CHECK(fired);
  CHECK(stats.count() == 0);  // reset after the restart

  // warmup applies again on the fresh segment
  CHECK_FALSE(wcusum_step(stats, -2000.0, k, cfg));
}

TEST_CASE("expected restart odds: identical predictions reduce to the prior odds") {
  const Vector mu = Vector::Constant(2, 0.3);
  Matrix sigma(2, 2);
  sigma << 0.5, 0.1, 0.1, 0.4;
  const double h = 0.02, w = 0.6;
  const double odds = expected_restart_odds(mu, sigma, mu, sigma, mu, sigma, h, w);
  CHECK(odds == doctest::Approx(std::log(h / ((1.0 - h) * w))).epsilon(1e-12));
}

TEST_CASE("init_restart_state: fresh uniform cloud and zero-mean discrepancy") {
  ThetaFilterConfig tcfg;
  tcfg.num_particles = 32;
  DiscrepancyUpdateConfig dcfg;
  Rng rng(2);
  auto [cloud, disc] = init_restart_state(tcfg, KernelConfig{}, dcfg, DiscrepancyVariant::E, 1,
                                          1, rng);
  CHECK(cloud.size() == 32);
  CHECK(cloud.weights.sum() == doctest::Approx(1.0));
  CHECK(disc.support.empty());
  auto [cloud2, disc2] = init_restart_state(tcfg, KernelConfig{}, dcfg, DiscrepancyVariant::F, 1,
                                            1, rng);
  CHECK(disc2.support.size() == static_cast<std::size_t>(dcfg.fixed_support_size));
  CHECK(disc2.gaussian.mean.norm() == 0.0);
}
