#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "brpc/stream.hpp"

using namespace brpc;

namespace {

StreamConfig small_cfg(StreamFamily family, std::uint64_t seed) {
  StreamConfig cfg;
  cfg.family = family;
  cfg.seed = seed;
  return cfg;
}

// independent brute-force projection of a 1-D response onto the simulator grid
double brute_force_projection(const std::function<double(double)>& zeta, const GridConfig& g) {
  double best = 0.0, best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.theta_grid; ++i) {
    const double theta =
        g.theta_lo + (g.theta_hi - g.theta_lo) * i / static_cast<double>(g.theta_grid - 1);
    double acc = 0.0;
    for (int j = 0; j < g.x_grid; ++j) {
      const double x = g.x_lo + (g.x_hi - g.x_lo) * j / static_cast<double>(g.x_grid - 1);
      const double d = std::sin(theta * x) + 5.0 * x - zeta(x);
      acc += d * d;
    }
    if (acc < best_val) {
      best_val = acc;
      best = theta;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("simulator formula") {
  SimulatorSpec sim;
  Vector x(1), theta(1);
  x << 0.3;
  theta << 1.7;
  CHECK(simulator_eval(sim, x, theta) == doctest::Approx(std::sin(1.7 * 0.3) + 5.0 * 0.3));
}

TEST_CASE("projected target of a simulator response recovers theta") {
  SimulatorSpec sim;
  GridConfig grid;
  const double theta_true = 1.3;
  const Vector t = projected_target(
      sim, [&](const Vector& x) { return std::sin(theta_true * x(0)) + 5.0 * x(0); }, grid);
  CHECK(std::abs(t(0) - theta_true) <= grid.theta_spacing() + 1e-12);
}

TEST_CASE("projected target of the omega=15 physical response matches brute force") {
  SimulatorSpec sim;
  GridConfig grid;
  const double omega = 15.0;
  auto zeta = [&](double x) { return 5.0 * x * std::cos(omega * x / 2.0) + 5.0 * x; };
  const Vector t =
      projected_target(sim, [&](const Vector& x) { return zeta(x(0)); }, grid);
  CHECK(t(0) == doctest::Approx(brute_force_projection(zeta, grid)).epsilon(1e-12));
}

TEST_CASE("stream generation is deterministic and annotated") {
  const StreamConfig cfg = small_cfg(StreamFamily::Sudden, 11);
  const auto s1 = gen_stream(cfg);
  const auto s2 = gen_stream(cfg);
  REQUIRE(s1.size() == static_cast<std::size_t>(cfg.num_batches()));
  for (std::size_t b = 0; b < s1.size(); ++b) {
    CHECK(s1[b].observations == s2[b].observations);
    CHECK(s1[b].projected_target == s2[b].projected_target);
    REQUIRE(s1[b].inputs.size() == static_cast<std::size_t>(cfg.batch_size));
  }
  const auto s3 = gen_stream(small_cfg(StreamFamily::Sudden, 12));
  CHECK(s1[0].observations != s3[0].observations);
}

TEST_CASE("sudden family: three changepoints with jumps above the floor") {
  const StreamConfig cfg = small_cfg(StreamFamily::Sudden, 5);
  const auto stream = gen_stream(cfg);
  int cps = 0;
  for (std::size_t b = 1; b < stream.size(); ++b) {
    if (stream[b].is_changepoint) {
      ++cps;
      const double jump =
          std::abs(stream[b].projected_target(0) - stream[b - 1].projected_target(0));
      CHECK(jump >= cfg.min_jump - 1e-9);
    }
  }
  CHECK(cps == 3);
  CHECK_FALSE(stream[0].is_changepoint);
}

TEST_CASE("targets stay inside the admissible range") {
  for (StreamFamily f : {StreamFamily::Drifting, StreamFamily::Mixed, StreamFamily::Sudden}) {
    const StreamConfig cfg = small_cfg(f, 3);
    for (const auto& rec : gen_stream(cfg)) {
      CHECK(rec.projected_target(0) >= cfg.theta_lo - 1e-9);
      CHECK(rec.projected_target(0) <= cfg.theta_hi + 1e-9);
    }
  }
}

TEST_CASE("omega -> theta-dagger mapping is self-consistent") {
  const StreamConfig cfg = small_cfg(StreamFamily::Mixed, 21);
  const auto stream = gen_stream(cfg);
  SimulatorSpec sim;
  for (std::size_t b = 0; b < stream.size(); b += 7) {
    const double omega = stream[b].latent_omega;
    const Vector reproj = projected_target(
        sim,
        [&](const Vector& x) {
          return 5.0 * x(0) * std::cos(omega * x(0) / 2.0) + 5.0 * x(0);
        },
        cfg.grid);
    CHECK(std::abs(stream[b].projected_target(0) - reproj(0)) <=
          cfg.grid.theta_spacing() + 1e-12);
  }
}

TEST_CASE("stationary family has constant target and no changepoints") {
  const StreamConfig cfg = small_cfg(StreamFamily::Stationary, 2);
  const auto stream = gen_stream(cfg);
  for (const auto& rec : stream) {
    CHECK_FALSE(rec.is_changepoint);
    CHECK(rec.projected_target(0) == doctest::Approx(stream[0].projected_target(0)));
  }
}

TEST_CASE("high-dim stream: 5-dim targets, 20-dim inputs, consistent projection") {
  StreamConfig cfg = small_cfg(StreamFamily::HighdimSudden, 9);
  cfg.total_obs = 200;
  const auto stream = gen_stream(cfg);
  REQUIRE(stream.size() == 10);
  REQUIRE(stream[0].projected_target.size() == 5);
  REQUIRE(stream[0].inputs[0].size() == 20);
  int cps = 0;
  for (const auto& rec : stream) cps += rec.is_changepoint ? 1 : 0;
  CHECK(cps >= 1);
}

TEST_CASE("CSV round trip") {
  StreamConfig cfg = small_cfg(StreamFamily::Drifting, 4);
  cfg.total_obs = 100;
  const auto stream = gen_stream(cfg);
  const std::string path = "test_stream_roundtrip.csv";
  write_stream_csv(path, stream);
  const auto back = read_stream_csv(path);
  REQUIRE(back.size() == stream.size());
  for (std::size_t b = 0; b < stream.size(); ++b) {
    CHECK(back[b].batch_index == stream[b].batch_index);
    CHECK((back[b].observations - stream[b].observations).norm() == 0.0);
    CHECK((back[b].projected_target - stream[b].projected_target).norm() == 0.0);
    CHECK(back[b].is_changepoint == stream[b].is_changepoint);
    for (std::size_t i = 0; i < stream[b].inputs.size(); ++i)
      CHECK((back[b].inputs[i] - stream[b].inputs[i]).norm() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("config JSON round trip") {
  StreamConfig cfg = small_cfg(StreamFamily::Mixed, 77);
  cfg.drift_slope = 0.002;
  cfg.jump_set = {0.4, 0.9};
  const StreamConfig back = stream_config_from_json(stream_config_to_json(cfg));
  CHECK(back.family == cfg.family);
  CHECK(back.seed == cfg.seed);
  CHECK(back.drift_slope == cfg.drift_slope);
  CHECK(back.jump_set == cfg.jump_set);
  CHECK(back.num_batches() == cfg.num_batches());
}

TEST_CASE("invalid config rejected") {
  StreamConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  CHECK_THROWS_AS(gen_stream(cfg), InvalidInput);
}
