// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.
#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "brpc/experiment.hpp"

using namespace brpc;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "CRITERION " << criterion << ": " << (pass ? "PASS" : "FAIL") << " — " << detail
            << '\n'
            << std::flush;
  if (!pass) ++g_failures;
}

int hw_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 2 : static_cast<int>(n);
}

struct CellStats {
  double theta_rmse = 0.0;
  double y_rmse = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double restarts = 0.0;
  int n = 0;
};

std::map<std::pair<std::string, std::string>, CellStats> cell_means(
    const std::vector<SummaryRow>& rows) {
  std::map<std::pair<std::string, std::string>, CellStats> out;
  for (const auto& r : rows) {
    CellStats& c = out[{r.scenario, r.method}];
    c.theta_rmse += r.theta_rmse;
    c.y_rmse += r.y_rmse;
    if (r.has_precision) c.precision += r.precision2;
    c.recall += r.recall2;
    c.restarts += r.restarts;
    c.n += 1;
  }
  for (auto& [k, c] : out) {
    c.theta_rmse /= c.n;
    c.y_rmse /= c.n;
    c.precision /= c.n;
    c.recall /= c.n;
    c.restarts /= c.n;
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Criteria 1-4: desk-scale Table-2 reproduction on the 1-D synthetic families.

void criteria_1_to_4() {
  ExperimentConfig cfg = default_experiment();
  cfg.master_seed = 20240817;
  cfg.num_seeds = 5;
  const ExperimentResult res = run_experiment_in_memory(cfg, hw_jobs());
  for (const auto& f : res.failures) std::cout << "  sweep failure: " << f << '\n';
  const auto cells = cell_means(res.rows);
  auto cell = [&](const std::string& s, const std::string& m) { return cells.at({s, m}); };

  const std::vector<std::string> brpc_variants = {"b-brpc", "b-brpc-rra", "c-brpc"};

  // 1. Drifting theta tracking, baselines at least 3x worse.
  {
    const double b = cell("drifting", "b-brpc").theta_rmse;
    const double c = cell("drifting", "c-brpc").theta_rmse;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : brpc_variants) best = std::min(best, cell("drifting", m).theta_rmse);
    const double bc = cell("drifting", "bc").theta_rmse;
    const double da = cell("drifting", "ward-pf").theta_rmse;
    const bool pass = res.failures.empty() && b <= 0.05 && c <= 0.05 && bc >= 3.0 * best &&
                      da >= 3.0 * best;
    report(1, pass,
           "drifting theta-RMSE: b-brpc=" + fmt(b) + " c-brpc=" + fmt(c) + " bc=" + fmt(bc) +
               " ward-pf=" + fmt(da) + " (best brpc=" + fmt(best) + ")");
  }

  // 2. Sudden(3) event detection and restart counts.
  {
    const CellStats rra = cell("sudden3", "b-brpc-rra");
    const double cr = cell("sudden3", "c-brpc").restarts;
    const double br = cell("sudden3", "b-brpc").restarts;
    const bool pass =
        rra.precision >= 0.90 && rra.recall >= 0.90 && cr >= 2.5 && cr <= 6.0 && cr < br;
    report(2, pass,
           "sudden3: rra precision@2=" + fmt(rra.precision) + " recall@2=" + fmt(rra.recall) +
               " restarts c-brpc=" + fmt(cr) + " b-brpc=" + fmt(br));
  }

  // 3. Mixed recall and tracking for every restart-augmented variant.
  {
    bool pass = true;
    std::string detail = "mixed:";
    for (const auto& m : brpc_variants) {
      const CellStats c = cell("mixed", m);
      pass = pass && c.recall >= 0.7 && c.theta_rmse <= 0.06;
      detail += " " + m + "(recall=" + fmt(c.recall) + ", rmse=" + fmt(c.theta_rmse) + ")";
    }
    report(3, pass, detail);
  }

  // 4. Response RMSE ordering per family.
  {
    bool pass = true;
    std::string detail = "y-RMSE best-brpc vs (bc, ward-pf):";
    for (const auto& s : {"drifting", "sudden3", "mixed"}) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& m : brpc_variants) best = std::min(best, cell(s, m).y_rmse);
      const double bc = cell(s, "bc").y_rmse;
      const double da = cell(s, "ward-pf").y_rmse;
      pass = pass && best < bc && best < da;
      detail += std::string(" ") + s + "=" + fmt(best) + "/(" + fmt(bc) + "," + fmt(da) + ")";
    }
    report(4, pass, detail);
  }
}

// ---------------------------------------------------------------------------
// 5. Sequential assimilation vs one-shot batch GP regression.

void criterion_5() {
  Rng rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    KernelConfig kernel;
    kernel.signal_variance = rng.uniform(0.3, 1.5);
    kernel.lengthscale = rng.uniform(0.3, 1.2);
    DiscrepancyUpdateConfig cfg;
    cfg.eta_delta = 1.0;
    cfg.inflation_sd = 0.0;
    cfg.residual_noise_sd = rng.uniform(0.05, 0.4);

    const int n = 5;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.uniform());
    const SupportSet support = SupportSet::from_scalars(xs);

    DiscrepancyState st = init_discrepancy(DiscrepancyVariant::E, kernel, cfg, 1);
    const int batches = 4;
    std::vector<Vector> resids;
    for (int b = 0; b < batches; ++b) {
      ResidualBatch rb;
      rb.inputs = support;
      rb.residuals = Vector::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(0.0, 0.3); });
      resids.push_back(rb.residuals);
      discrepancy_step(st, rb, cfg);
    }

    // oracle: covariance-form GP regression on the stacked observations
    const Matrix k = kernel_matrix(support, support, kernel);
    Matrix gram = Matrix::Zero(n * batches, n * batches);
    Matrix cross(n, n * batches);
    Vector y(n * batches);
    for (int a = 0; a < batches; ++a) {
      y.segment(a * n, n) = resids[static_cast<std::size_t>(a)];
      cross.block(0, a * n, n, n) = k;
      for (int b = 0; b < batches; ++b) gram.block(a * n, b * n, n, n) = k;
    }
    gram += cfg.residual_noise_sd * cfg.residual_noise_sd *
            Matrix::Identity(n * batches, n * batches);
    const PdFactor f(gram);
    worst = std::max(worst, (st.gaussian.mean - Vector(cross * f.solve(y))).norm());
    worst = std::max(worst,
                     (st.gaussian.covariance -
                      Matrix(k - cross * f.solve(Matrix(cross.transpose()))))
                         .norm());
  }
  report(5, worst <= 1e-8, "sequential vs batch GP, max deviation " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 6. Closed-form update checks (particle reweight and proximal optimality).

void criterion_6() {
  SimulatorSpec sim;
  Rng rng(606);
  double worst_w = 0.0, worst_g = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // particle update vs direct tempered-Bayes evaluation
    ThetaFilterConfig tcfg;
    tcfg.obs_sd = rng.uniform(0.05, 0.3);
    tcfg.eta_theta = rng.uniform(0.3, 1.5);
    const int np = 16, k = 6;
    ParticleCloud cloud;
    Vector raw(np);
    for (int i = 0; i < np; ++i) {
      cloud.particles.push_back(Vector::Constant(1, rng.uniform(0.0, 3.0)));
      raw(i) = rng.uniform(0.1, 1.0);
    }
    cloud.weights = raw / raw.sum();
    Batch batch;
    Vector obs(k);
    for (int j = 0; j < k; ++j) {
      batch.inputs.push_back(Vector::Constant(1, rng.uniform()));
      obs(j) = rng.uniform(0.0, 6.0);
    }
    batch.observations = obs;

    Vector direct(np);
    for (int i = 0; i < np; ++i) {
      double ll = 0.0;
      for (int j = 0; j < k; ++j) {
        const double d = obs(j) - simulator_eval(sim, batch.inputs[static_cast<std::size_t>(j)],
                                                 cloud.particles[static_cast<std::size_t>(i)]);
        ll += -0.5 * d * d / (tcfg.obs_sd * tcfg.obs_sd) -
              0.5 * std::log(2.0 * 3.14159265358979323846 * tcfg.obs_sd * tcfg.obs_sd);
      }
      direct(i) = cloud.weights(i) * std::exp(tcfg.eta_theta * ll);
    }
    direct /= direct.sum();
    reweight(cloud, batch, sim, tcfg);
    worst_w = std::max(worst_w, (cloud.weights - direct).lpNorm<Eigen::Infinity>());

    // information-form update satisfies the proximal first-order condition
    const int n = 5, m = 3;
    Matrix a = Matrix::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    GaussianState pre;
    pre.covariance = a * a.transpose() + 0.4 * Matrix::Identity(n, n);
    pre.mean = Vector::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
    Matrix g = Matrix::NullaryExpr(m, n, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    const double rv = rng.uniform(0.01, 0.2);
    ResidualBatch rb;
    rb.residuals = Vector::NullaryExpr(m, [&](Eigen::Index) { return rng.normal(); });
    const double eta = rng.uniform(0.3, 1.5);
    const GaussianState post = assimilate(pre, g, rv * Matrix::Identity(m, m), rb, eta);
    const Vector grad = PdFactor(pre.covariance).solve(Vector(post.mean - pre.mean)) -
                        eta * g.transpose() * (rb.residuals - g * post.mean) / rv;
    worst_g = std::max(worst_g, grad.norm());
  }
  report(6, worst_w <= 1e-8 && worst_g <= 1e-8,
         "particle-update deviation " + fmt(worst_w) + ", proximal gradient norm " + fmt(worst_g));
}

// ---------------------------------------------------------------------------
// 7. Variant E vs variant P equivalence on common supports.

void criterion_7() {
  Rng rng(707);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    KernelConfig kernel;
    DiscrepancyUpdateConfig cfg;
    cfg.residual_noise_sd = 0.1;
    DiscrepancyState e = init_discrepancy(DiscrepancyVariant::E, kernel, cfg, 1);
    DiscrepancyState p = init_discrepancy(DiscrepancyVariant::P, kernel, cfg, 1);
    for (int b = 0; b < 8; ++b) {
      ResidualBatch rb;
      std::vector<double> xs;
      for (int i = 0; i < 4; ++i) xs.push_back(rng.uniform());
      rb.inputs = SupportSet::from_scalars(xs);
      rb.residuals = Vector::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(0.0, 0.25); });
      discrepancy_step(e, rb, cfg);
      discrepancy_step(p, rb, cfg);
      worst = std::max(worst, (e.gaussian.mean - p.gaussian.mean).norm());
      worst = std::max(worst, (e.gaussian.covariance - p.gaussian.covariance).norm());
    }
  }
  report(7, worst <= 1e-6, "variant E vs P max deviation " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 8. Theorem-1 tracking bound on replayed diagnostic runs.

void criterion_8() {
  bool all_hold = true;
  double worst_gamma = 0.0;
  int runs_checked = 0;
  for (int seed_idx = 0; seed_idx < 10; ++seed_idx) {
    StreamConfig scfg;
    scfg.family = StreamFamily::Drifting;
    scfg.total_obs = 300;
    scfg.seed = derive_seed(808, static_cast<std::uint64_t>(seed_idx));
    const auto stream = gen_stream(scfg);

    MethodSpec spec;
    spec.kind = MethodKind::BrpcNoRestart;
    spec.id = "diag-f";
    spec.variant = DiscrepancyVariant::F;
    spec.diagnostics = true;
    spec.theta.num_particles = 256;
    // weak assimilation plus strong inflation keeps the pre-update precision
    // strictly contracting for the whole run
    spec.disc.residual_noise_sd = 10.0;
    spec.disc.inflation_sd = 0.3;
    const RunLog log = run_method_on_stream(spec, stream, scfg.simulator(),
                                            derive_seed(809, static_cast<std::uint64_t>(seed_idx)));
    if (log.failed || log.diagnostics.empty()) {
      all_hold = false;
      continue;
    }

    // measure the empirical contraction, then test with gamma just above it
    const std::vector<Vector> self_path = [&] {
      std::vector<Vector> v = {log.init_mean};
      for (const auto& d : log.diagnostics) v.push_back(d.post_mean);
      return v;
    }();
    TrackingBoundResult probe = tracking_bound_check(log, self_path, 0.0, spec.disc.eta_delta);
    const double gamma = probe.max_empirical_gamma;
    worst_gamma = std::max(worst_gamma, gamma);
    if (gamma >= 1.0) {
      all_hold = false;
      continue;
    }

    // reference path 1: the filter's own posterior means
    const TrackingBoundResult r1 = tracking_bound_check(log, self_path, gamma,
                                                        spec.disc.eta_delta);
    // reference path 2: the constant initial mean
    std::vector<Vector> const_path(log.diagnostics.size() + 1, log.init_mean);
    const TrackingBoundResult r2 = tracking_bound_check(log, const_path, gamma,
                                                        spec.disc.eta_delta);
    all_hold = all_hold && r1.holds && r2.holds;
    ++runs_checked;
  }
  report(8, all_hold && runs_checked >= 10,
         "tracking bound held on " + std::to_string(runs_checked) +
             "/10 runs, max empirical gamma " + fmt(worst_gamma));
}

// ---------------------------------------------------------------------------
// 9. expected_restart_odds vs Monte Carlo.

void criterion_9() {
  Rng rng(909);
  bool pass = true;
  double worst_z = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + (trial % 2);
    auto rand_cov = [&]() {
      Matrix a = Matrix::NullaryExpr(d, d,
                                     [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
      return Matrix(a * a.transpose() + 0.3 * Matrix::Identity(d, d));
    };
    auto rand_mean = [&]() {
      return Vector(Vector::NullaryExpr(d, [&](Eigen::Index) { return rng.normal(); }));
    };
    const Vector mu_c = rand_mean(), mu_n = rand_mean(), mu_s = rand_mean();
    const Matrix sig_c = rand_cov(), sig_n = rand_cov(), sig_s = rand_cov();
    const double h = rng.uniform(0.005, 0.1);
    const double w = rng.uniform(0.3, 0.95);

    const double expect = expected_restart_odds(mu_c, sig_c, mu_n, sig_n, mu_s, sig_s, h, w);

    const Eigen::LLT<Matrix> llt(sig_s);
    const Matrix chol = llt.matrixL();
    GaussianState gc{mu_c, sig_c}, gn{mu_n, sig_n};
    const int samples = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Vector z = Vector::NullaryExpr(d, [&](Eigen::Index) { return rng.normal(); });
      const Vector y = mu_s + chol * z;
      const double lo =
          std::log(h / ((1.0 - h) * w)) + gaussian_logpdf(y, gn) - gaussian_logpdf(y, gc);
      sum += lo;
      sumsq += lo * lo;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sumsq / samples - mean * mean) / samples);
    const double z_stat = std::abs(mean - expect) / std::max(se, 1e-12);
    worst_z = std::max(worst_z, z_stat);
    pass = pass && z_stat <= 3.0;
  }
  report(9, pass, "Prop-3 Monte Carlo, worst |z| = " + fmt(worst_z));
}

// ---------------------------------------------------------------------------
// 10. wCUSUM false-alarm rate and detection delay at the theoretical threshold.

void criterion_10() {
  // The guarantee is stated for the window statistic applied to standardized
  // scores, so the Monte Carlo streams are generated directly in standardized
  // units (null N(0,1), post-change N(drift+1, 1)) and fed to the statistic.
  // The window must be wide enough for sqrt(m)*(mean - kappa) to accumulate a
  // shift of delta = kappa + 1 past the threshold: m* ~ threshold^2 wanted.
  const int T = 200, W = 64;
  const double alpha = 0.05;
  WcusumConfig cfg;
  cfg.window = W;
  cfg.drift = 0.25;
  cfg.threshold = std::sqrt(2.0 * std::log(T * W / alpha));

  // feeds an already-standardized score into the window buffer and applies
  // the threshold rule
  auto step = [&](ScoreStats& stats, double z) {
    stats.push(z, z, cfg);
    return stats.statistic(cfg) > cfg.threshold;
  };

  Rng rng(1010);
  int false_alarms = 0;
  const int streams = 1000;
  for (int s = 0; s < streams; ++s) {
    ScoreStats stats;
    for (int t = 0; t < T; ++t) {
      if (step(stats, rng.normal(0.0, 1.0))) {
        ++false_alarms;
        break;
      }
    }
  }
  const double fa_rate = static_cast<double>(false_alarms) / streams;

  // detection delay with a post-change mean shift of drift + 1
  const double delta = cfg.drift + 1.0;
  const int change_at = 60;
  double total_delay = 0.0;
  int detected = 0;
  const int shift_streams = 400;
  for (int s = 0; s < shift_streams; ++s) {
    ScoreStats stats;
    for (int t = 0; t < T; ++t) {
      if (step(stats, rng.normal(t >= change_at ? delta : 0.0, 1.0))) {
        if (t >= change_at) {
          total_delay += t - change_at;
          ++detected;
        }
        break;
      }
    }
  }
  const double mean_delay = detected > 0 ? total_delay / detected : 1e9;
  const double delay_bound = 4.0 * cfg.threshold * cfg.threshold;
  const bool pass =
      fa_rate <= alpha && mean_delay <= delay_bound && detected >= shift_streams * 9 / 10;
  report(10, pass,
         "false-alarm rate " + fmt(fa_rate) + " (<= " + fmt(alpha) + "), mean delay " +
             fmt(mean_delay) + " (<= " + fmt(delay_bound) + ", " + std::to_string(detected) +
             "/" + std::to_string(shift_streams) + " detected)");
}

// ---------------------------------------------------------------------------
// 11. gamma diagnostics on the mixed stream.

void criterion_11() {
  StreamConfig scfg;
  scfg.family = StreamFamily::Mixed;
  scfg.seed = derive_seed(1111, std::uint64_t{0});
  const auto stream = gen_stream(scfg);

  MethodSpec spec;
  spec.kind = MethodKind::BrpcWcusum;
  spec.id = "c-brpc-diag";
  spec.diagnostics = true;
  spec.theta.num_particles = 512;
  // diagnostic regime: weak assimilation with covariance inflation, so the
  // propagated pre-update precision stays contractive (Assumption-1 analogue)
  spec.disc.residual_noise_sd = 10.0;
  spec.disc.inflation_sd = 0.1;
  const RunLog log = run_method_on_stream(spec, stream, scfg.simulator(), 1112);
  if (log.failed) {
    report(11, false, "diagnostic run failed: " + log.failure);
    return;
  }
  const GammaSummary g = gamma_replay(log);
  const bool pass = g.frac_prior_le_1 >= 0.90;
  report(11, pass,
         "frac(gamma_prior <= 1) = " + fmt(g.frac_prior_le_1) + ", max gamma_post = " +
             fmt(g.max_post) + (g.max_post > 1.0 ? " (exceeds 1, expected)" : ""));
}

// ---------------------------------------------------------------------------
// 12. Determinism: bit-identical reruns, parallel == serial.

void criterion_12() {
  StreamConfig scfg;
  scfg.family = StreamFamily::Sudden;
  scfg.seed = 1212;
  const auto stream = gen_stream(scfg);
  MethodSpec spec;
  spec.kind = MethodKind::BrpcBocpd;
  spec.id = "b-brpc";
  const RunLog a = run_method_on_stream(spec, stream, scfg.simulator(), 7);
  const RunLog b = run_method_on_stream(spec, stream, scfg.simulator(), 7);
  bool identical = !a.failed && !b.failed && a.entries.size() == b.entries.size();
  if (identical)
    for (std::size_t t = 0; t < a.entries.size(); ++t) {
      identical = identical && a.entries[t].theta_hat == b.entries[t].theta_hat &&
                  a.entries[t].pre_log_density == b.entries[t].pre_log_density &&
                  a.entries[t].restarted == b.entries[t].restarted &&
                  a.entries[t].y_crps_sum == b.entries[t].y_crps_sum;
    }

  ExperimentConfig cfg;
  cfg.master_seed = 33;
  cfg.num_seeds = 2;
  StreamConfig small;
  small.family = StreamFamily::Drifting;
  small.total_obs = 200;
  cfg.scenarios = {{"drift", small}};
  MethodSpec m1 = spec;
  m1.theta.num_particles = 128;
  MethodSpec m2;
  m2.kind = MethodKind::Bc;
  m2.id = "bc";
  cfg.methods = {m1, m2};
  const ExperimentResult serial = run_experiment_in_memory(cfg, 1);
  const ExperimentResult parallel = run_experiment_in_memory(cfg, 4);
  bool swept = serial.rows.size() == parallel.rows.size();
  if (swept)
    for (std::size_t i = 0; i < serial.rows.size(); ++i)
      swept = swept && serial.rows[i].scenario == parallel.rows[i].scenario &&
              serial.rows[i].method == parallel.rows[i].method &&
              serial.rows[i].theta_rmse == parallel.rows[i].theta_rmse &&
              serial.rows[i].y_crps == parallel.rows[i].y_crps;

  report(12, identical && swept,
         std::string("bit-identical rerun: ") + (identical ? "yes" : "no") +
             ", parallel == serial: " + (swept ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 13. High-dimensional diagnostic: BRPC-F vs PF-DA, 2 seeds.

void criterion_13() {
  double brpc_sum = 0.0, da_sum = 0.0;
  bool ok = true;
  for (int seed_idx = 0; seed_idx < 2; ++seed_idx) {
    StreamConfig scfg;
    scfg.family = StreamFamily::HighdimDrifting;
    scfg.total_obs = 3840;
    scfg.batch_size = 64;
    scfg.seed = derive_seed(1313, static_cast<std::uint64_t>(seed_idx));
    const auto stream = gen_stream(scfg);

    // Fixed-support BRPC state without a hard restart rule; the batch is
    // large enough for the local update to adapt on its own.  A wide theta
    // likelihood with a small random walk pools information across batches
    // instead of chasing per-batch projection jitter.
    MethodSpec brpc_f;
    brpc_f.kind = MethodKind::BrpcNoRestart;
    brpc_f.id = "brpc-f";
    brpc_f.variant = DiscrepancyVariant::F;
    brpc_f.disc.fixed_support_size = 128;
    brpc_f.theta.num_particles = 4096;
    brpc_f.theta.obs_sd = 1.0;
    brpc_f.theta.rw_scale = 0.03;
    MethodSpec da;
    da.kind = MethodKind::WardPf;
    da.id = "ward-pf";
    // Scale the residual-GP lengthscale to the 20-d input space (typical
    // pairwise distances ~1.8); the 1-d setting of 0.3 would zero the GP.
    da.ward.disc_kernel = KernelConfig{1.0, 2.0};

    const RunLog lb = run_method_on_stream(brpc_f, stream, scfg.simulator(),
                                           derive_seed(1314, static_cast<std::uint64_t>(seed_idx)));
    const RunLog ld = run_method_on_stream(da, stream, scfg.simulator(),
                                           derive_seed(1315, static_cast<std::uint64_t>(seed_idx)));
    ok = ok && !lb.failed && !ld.failed;
    if (!ok) break;
    brpc_sum += theta_rmse(lb);
    da_sum += theta_rmse(ld);
  }
  const double brpc_mean = brpc_sum / 2.0, da_mean = da_sum / 2.0;
  const bool pass = ok && da_mean >= 2.0 * brpc_mean;
  report(13, pass,
         "high-dim theta-RMSE brpc-f=" + fmt(brpc_mean) + " pf-da=" + fmt(da_mean));
}

}  // namespace

int main() {
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_9();
  criterion_10();
  criterion_8();
  criterion_11();
  criterion_12();
  criterion_13();
  criteria_1_to_4();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: ") << (g_failures ? std::to_string(g_failures) : std::string()) << '\n';
  return g_failures == 0 ? 0 : 1;
}
