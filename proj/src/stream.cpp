#include "brpc/stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace brpc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double synthetic1d_sim(double x, double theta) { return std::sin(theta * x) + 5.0 * x; }

// phi_j(x) = sin(2*pi*x_j) + 0.5*cos(2*pi*x_{j+5}) + 0.25*sin(2*pi*(x_j + x_{j+10})),
// 1-based j = 1..5.
double highdim_basis(int j, const Vector& x) {
  return std::sin(kTwoPi * x(j)) + 0.5 * std::cos(kTwoPi * x(j + 5)) +
         0.25 * std::sin(kTwoPi * (x(j) + x(j + 10)));
}

// Radical-inverse (Halton) low-discrepancy sequence, first 20 primes.
constexpr int kPrimes[20] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                             31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(int base, std::uint64_t n) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (n > 0) {
    r += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

std::vector<Vector> halton_design(int n, int dim) {
  std::vector<Vector> pts(n, Vector(dim));
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d)
      pts[i](d) = radical_inverse(kPrimes[d], static_cast<std::uint64_t>(i) + 1);
  return pts;
}

// Dense simulator table for the 1-D grid projection: rows are theta
// candidates, columns are x locations.
struct Projection1dTable {
  std::vector<double> thetas;
  std::vector<double> xs;
  Matrix sim;  // theta_grid x x_grid

  explicit Projection1dTable(const GridConfig& g) {
    thetas.resize(g.theta_grid);
    xs.resize(g.x_grid);
    for (int i = 0; i < g.theta_grid; ++i)
      thetas[i] = g.theta_lo + (g.theta_hi - g.theta_lo) * i / (g.theta_grid - 1);
    for (int j = 0; j < g.x_grid; ++j)
      xs[j] = g.x_lo + (g.x_hi - g.x_lo) * j / (g.x_grid - 1);
    sim.resize(g.theta_grid, g.x_grid);
    for (int i = 0; i < g.theta_grid; ++i)
      for (int j = 0; j < g.x_grid; ++j) sim(i, j) = synthetic1d_sim(xs[j], thetas[i]);
  }

  double project(const std::function<double(double)>& zeta) const {
    Eigen::RowVectorXd z(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j) z(static_cast<Eigen::Index>(j)) = zeta(xs[j]);
    Eigen::Index best = 0;
    (sim.rowwise() - z).rowwise().squaredNorm().minCoeff(&best);
    return thetas[static_cast<std::size_t>(best)];
  }
};

using GridKey = std::tuple<int, double, double, int, double, double>;

const Projection1dTable& projection_table(const GridConfig& g) {
  static std::mutex mu;
  static std::map<GridKey, std::unique_ptr<Projection1dTable>> cache;
  GridKey key{g.theta_grid, g.theta_lo, g.theta_hi, g.x_grid, g.x_lo, g.x_hi};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Projection1dTable>(g)).first;
  return *it->second;
}

}  // namespace

double simulator_eval(const SimulatorSpec& spec, const Vector& x, const Vector& theta) {
  if (x.size() != spec.input_dim() || theta.size() != spec.theta_dim())
    throw InvalidInput("simulator_eval: dimension mismatch");
  if (spec.kind == SimulatorKind::Synthetic1d) return synthetic1d_sim(x(0), theta(0));
  double y = 0.0;
  for (int j = 0; j < 5; ++j) y += theta(j) * highdim_basis(j, x);
  return y;
}

Vector projected_target(const SimulatorSpec& spec,
                        const std::function<double(const Vector&)>& physical_fn,
                        const GridConfig& grid) {
  if (grid.theta_grid <= 1 || grid.x_grid <= 0) throw InvalidInput("projected_target: bad grid");
  if (spec.kind == SimulatorKind::Synthetic1d) {
    const auto& table = projection_table(grid);
    Vector v(1);
    v(0) = table.project([&](double x) {
      Vector xv(1);
      xv(0) = x;
      return physical_fn(xv);
    });
    return v;
  }
  const auto design = halton_design(grid.ref_design, spec.input_dim());
  Matrix phi(grid.ref_design, 5);
  Vector zeta(grid.ref_design);
  for (int m = 0; m < grid.ref_design; ++m) {
    for (int j = 0; j < 5; ++j) phi(m, j) = highdim_basis(j, design[static_cast<std::size_t>(m)]);
    zeta(m) = physical_fn(design[static_cast<std::size_t>(m)]);
  }
  Matrix gram = phi.transpose() * phi;
  gram.diagonal().array() += grid.ridge;
  return PdFactor(gram).solve(Vector(phi.transpose() * zeta));
}

bool is_highdim(StreamFamily f) {
  return f == StreamFamily::HighdimDrifting || f == StreamFamily::HighdimSudden ||
         f == StreamFamily::HighdimMixed;
}

std::string family_name(StreamFamily f) {
  switch (f) {
    case StreamFamily::Drifting: return "drifting";
    case StreamFamily::Sudden: return "sudden";
    case StreamFamily::Mixed: return "mixed";
    case StreamFamily::Stationary: return "stationary";
    case StreamFamily::HighdimDrifting: return "highdim-drifting";
    case StreamFamily::HighdimSudden: return "highdim-sudden";
    case StreamFamily::HighdimMixed: return "highdim-mixed";
  }
  return "unknown";
}

StreamFamily family_from_name(const std::string& name) {
  for (StreamFamily f : {StreamFamily::Drifting, StreamFamily::Sudden, StreamFamily::Mixed,
                         StreamFamily::Stationary, StreamFamily::HighdimDrifting,
                         StreamFamily::HighdimSudden, StreamFamily::HighdimMixed})
    if (family_name(f) == name) return f;
  throw InvalidInput("unknown stream family: " + name);
}

void StreamConfig::validate() const {
  if (total_obs <= 0 || batch_size <= 0) throw InvalidInput("stream sizes must be positive");
  if (total_obs % batch_size != 0) throw InvalidInput("total_obs must be divisible by batch_size");
  if (theta_lo >= theta_hi) throw InvalidInput("admissible range is empty");
  if (noise_sd < 0.0) throw InvalidInput("noise_sd must be nonnegative");
}

OmegaMap::OmegaMap(const StreamConfig& cfg) {
  const auto& table = projection_table(cfg.grid);
  omegas_.reserve(static_cast<std::size_t>(cfg.omega_grid));
  targets_.reserve(static_cast<std::size_t>(cfg.omega_grid));
  for (int i = 0; i < cfg.omega_grid; ++i) {
    const double w = cfg.omega_lo + (cfg.omega_hi - cfg.omega_lo) * i / (cfg.omega_grid - 1);
    const double t =
        table.project([w](double x) { return 5.0 * x * std::cos(w * x / 2.0) + 5.0 * x; });
    // Only omegas whose projected target lies in the admissible range are
    // usable: the realized target must stay inside [theta_lo, theta_hi].
    if (t < cfg.theta_lo || t > cfg.theta_hi) continue;
    omegas_.push_back(w);
    targets_.push_back(t);
  }
  if (targets_.empty())
    throw InvalidInput("no omega in the inversion grid projects into the admissible range");
}

void OmegaMap::invert(double target, double& omega, double& realized_target) const {
  std::size_t best = 0;
  double best_gap = std::abs(targets_[0] - target);
  for (std::size_t i = 1; i < targets_.size(); ++i) {
    const double gap = std::abs(targets_[i] - target);
    if (gap < best_gap) {  // ties keep the lower omega
      best_gap = gap;
      best = i;
    }
  }
  omega = omegas_[best];
  realized_target = targets_[best];
}

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Jump sign that keeps the target inside the admissible range; random when
// both directions fit.
double signed_jump(double value, double magnitude, const StreamConfig& cfg, Rng& rng) {
  const bool up_ok = value + magnitude <= cfg.theta_hi;
  const bool down_ok = value - magnitude >= cfg.theta_lo;
  if (up_ok && down_ok) return rng.uniform() < 0.5 ? magnitude : -magnitude;
  if (up_ok) return magnitude;
  if (down_ok) return -magnitude;
  return value < 0.5 * (cfg.theta_lo + cfg.theta_hi) ? magnitude : -magnitude;
}

std::vector<TrajectoryPoint> scalar_trajectory(const StreamConfig& cfg) {
  const int batches = cfg.num_batches();
  Rng rng(derive_seed(cfg.seed, "trajectory"));
  std::vector<TrajectoryPoint> out(static_cast<std::size_t>(batches));
  auto set = [&](int b, double v, bool cp) {
    Vector t(1);
    t(0) = clip(v, cfg.theta_lo, cfg.theta_hi);
    out[static_cast<std::size_t>(b)] = {t, cp};
  };

  switch (cfg.family) {
    case StreamFamily::Stationary: {
      for (int b = 0; b < batches; ++b) set(b, cfg.theta0, false);
      break;
    }
    case StreamFamily::Drifting: {
      for (int b = 0; b < batches; ++b) set(b, cfg.theta0 + cfg.drift_slope * b, false);
      break;
    }
    case StreamFamily::Sudden: {
      double level = cfg.theta0;
      int next_jump = 1;
      std::size_t jump_idx = 0;
      for (int b = 0; b < batches; ++b) {
        const int cp_batch = (next_jump * cfg.segment_len) / cfg.batch_size;
        bool cp = false;
        if (b > 0 && b == cp_batch) {
          const double mag = cfg.jump_set[jump_idx % cfg.jump_set.size()];
          level = clip(level + signed_jump(level, mag, cfg, rng), cfg.theta_lo, cfg.theta_hi);
          ++jump_idx;
          ++next_jump;
          cp = true;
        }
        set(b, level, cp);
      }
      break;
    }
    case StreamFamily::Mixed: {
      const int c1 = static_cast<int>(std::lround(0.33 * batches)) +
                     static_cast<int>(std::floor(rng.uniform(-cfg.cp_jitter, cfg.cp_jitter + 1)));
      const int c2 = static_cast<int>(std::lround(0.70 * batches)) +
                     static_cast<int>(std::floor(rng.uniform(-cfg.cp_jitter, cfg.cp_jitter + 1)));
      double slope = cfg.mixed_drift * (rng.uniform() < 0.5 ? 1.0 : -1.0);
      double xi = 0.0;
      double value = cfg.theta0;
      std::size_t jump_idx = 0;
      for (int b = 0; b < batches; ++b) {
        bool cp = false;
        if (b == c1 || b == c2) {
          double mag = cfg.mixed_jump_set[jump_idx % cfg.mixed_jump_set.size()];
          mag = std::max(mag, cfg.min_jump);
          value += signed_jump(value, mag, cfg, rng);
          slope = cfg.mixed_drift * (rng.uniform() < 0.5 ? 1.0 : -1.0);
          ++jump_idx;
          cp = true;
        } else if (b > 0) {
          xi = cfg.ar_coeff * xi + cfg.perturb_sd * rng.normal();
          value += slope + xi;
        }
        value = clip(value, cfg.theta_lo, cfg.theta_hi);
        set(b, value, cp);
      }
      break;
    }
    default:
      throw InvalidInput("scalar_trajectory: highdim family");
  }
  return out;
}

Vector random_unit(Rng& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  return v / v.norm();
}

struct HighdimTruth {
  Vector a0;
  Vector v1, v2;     // drift directions
  Vector u1, u2;     // mixed jump directions
  // random Fourier features of the locally heterogeneous residual term
  std::vector<Vector> omega;
  std::vector<double> alpha;
  std::vector<double> phase;
  Vector bump_center;
  double bump_sd = 0.2;

  static constexpr int kFeatures = 32;

  explicit HighdimTruth(Rng rng) {
    a0 = Vector(5);
    for (int i = 0; i < 5; ++i) a0(i) = 0.5 + 0.2 * rng.normal();
    v1 = random_unit(rng, 5);
    v2 = random_unit(rng, 5);
    u1 = random_unit(rng, 5);
    u2 = random_unit(rng, 5);
    omega.resize(kFeatures, Vector(20));
    alpha.resize(kFeatures);
    phase.resize(kFeatures);
    for (int l = 0; l < kFeatures; ++l) {
      for (int d = 0; d < 20; ++d) omega[static_cast<std::size_t>(l)](d) = rng.normal(0.0, 2.0);
      alpha[static_cast<std::size_t>(l)] = rng.normal(0.0, 1.0 / std::sqrt(double(kFeatures)));
      phase[static_cast<std::size_t>(l)] = rng.uniform(0.0, kTwoPi);
    }
    bump_center = Vector::Constant(3, 0.5);
  }

  double g(int j, const Vector& x) const {
    return std::sin(kTwoPi * x(j) + 0.4 * x(j + 5)) + 0.4 * std::cos(kTwoPi * x(j + 10)) +
           0.3 * x(j + 15) * x(j);
  }

  double h(const Vector& x) const {
    const double d2 = (x.head(3) - bump_center).squaredNorm();
    const double envelope = 1.0 + 1.5 * std::exp(-d2 / (2.0 * bump_sd * bump_sd));
    double s = 0.0;
    for (int l = 0; l < kFeatures; ++l)
      s += alpha[static_cast<std::size_t>(l)] * std::sqrt(2.0) *
           std::cos(omega[static_cast<std::size_t>(l)].dot(x) + phase[static_cast<std::size_t>(l)]);
    return envelope * s;
  }

  double zeta(const Vector& a, const Vector& x) const {
    double s = 0.4 * h(x);
    for (int j = 0; j < 5; ++j) s += a(j) * g(j, x);
    return s;
  }
};

std::vector<TrajectoryPoint> highdim_coeff_trajectory(const StreamConfig& cfg,
                                                      const HighdimTruth& truth) {
  const int batches = cfg.num_batches();
  std::vector<TrajectoryPoint> out(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const double frac = static_cast<double>(b) / batches;
    Vector a;
    bool cp = false;
    switch (cfg.family) {
      case StreamFamily::HighdimDrifting:
        a = truth.a0 + 0.8 * frac * truth.v1 + 0.15 * std::sin(kTwoPi * frac) * truth.v2;
        break;
      case StreamFamily::HighdimSudden: {
        a = truth.a0;
        const int c1 = static_cast<int>(std::lround(0.25 * batches));
        const int c2 = static_cast<int>(std::lround(0.50 * batches));
        const int c3 = static_cast<int>(std::lround(0.75 * batches));
        if (b >= c1) a += cfg.highdim_sudden_jump * truth.u1;
        if (b >= c2) a -= cfg.highdim_sudden_jump * truth.u2;
        if (b >= c3) a += cfg.highdim_sudden_jump * truth.u1;
        cp = (b == c1 || b == c2 || b == c3);
        break;
      }
      case StreamFamily::HighdimMixed: {
        a = truth.a0 + 0.4 * frac * truth.v1 + 0.10 * std::sin(kTwoPi * frac) * truth.v2;
        const int c1 = static_cast<int>(std::lround(0.33 * batches));
        const int c2 = static_cast<int>(std::lround(0.70 * batches));
        if (b >= c1) a += cfg.highdim_mixed_jump * truth.u1;
        if (b >= c2) a += cfg.highdim_mixed_jump * truth.u2;
        cp = (b == c1 || b == c2);
        break;
      }
      default:
        throw InvalidInput("highdim_coeff_trajectory: scalar family");
    }
    out[static_cast<std::size_t>(b)] = {a, cp};
  }
  return out;
}

std::vector<StreamRecord> gen_stream_synthetic1d(const StreamConfig& cfg) {
  const auto traj = gen_trajectory(cfg);
  const OmegaMap omega_map(cfg);
  Rng input_rng(derive_seed(cfg.seed, "inputs"));
  Rng noise_rng(derive_seed(cfg.seed, "noise"));

  std::vector<StreamRecord> records;
  records.reserve(traj.size());
  double prev_target = 0.0;
  for (std::size_t b = 0; b < traj.size(); ++b) {
    StreamRecord rec;
    rec.batch_index = static_cast<int>(b);
    rec.is_changepoint = traj[b].is_changepoint;

    double nominal = traj[b].target(0);
    double omega = 0.0, realized = 0.0;
    omega_map.invert(nominal, omega, realized);
    if (rec.is_changepoint && b > 0) {
      // enforce the minimum realized jump: push the nominal target outward
      // until the inverted omega produces a large enough step
      const double dir = nominal >= prev_target ? 1.0 : -1.0;
      for (int iter = 0; iter < 200 && std::abs(realized - prev_target) < cfg.min_jump; ++iter) {
        nominal = clip(nominal + dir * 0.01, cfg.theta_lo, cfg.theta_hi);
        omega_map.invert(nominal, omega, realized);
        if (nominal == cfg.theta_lo || nominal == cfg.theta_hi) break;
      }
    }
    prev_target = realized;
    rec.latent_omega = omega;
    rec.projected_target = Vector::Constant(1, realized);

    // randomized stratified grid on [0,1]: one uniform point per cell, shuffled
    std::vector<Vector> xs(static_cast<std::size_t>(cfg.batch_size), Vector(1));
    for (int k = 0; k < cfg.batch_size; ++k)
      xs[static_cast<std::size_t>(k)](0) = (k + input_rng.uniform()) / cfg.batch_size;
    std::shuffle(xs.begin(), xs.end(), input_rng.engine());
    rec.inputs = std::move(xs);

    rec.observations = Vector(cfg.batch_size);
    for (int k = 0; k < cfg.batch_size; ++k) {
      const double x = rec.inputs[static_cast<std::size_t>(k)](0);
      const double zeta = 5.0 * x * std::cos(omega * x / 2.0) + 5.0 * x;
      rec.observations(k) = zeta + cfg.noise_sd * noise_rng.normal();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<StreamRecord> gen_stream_highdim(const StreamConfig& cfg) {
  const HighdimTruth truth{Rng(derive_seed(cfg.seed, "physical"))};
  const auto coeffs = highdim_coeff_trajectory(cfg, truth);
  Rng input_rng(derive_seed(cfg.seed, "inputs"));
  Rng noise_rng(derive_seed(cfg.seed, "noise"));

  // ridge projection is linear in the physical coefficients, so precompute
  // theta = W a + w0 on the reference design
  const auto design = halton_design(cfg.grid.ref_design, 20);
  Matrix phi(cfg.grid.ref_design, 5), g(cfg.grid.ref_design, 5);
  Vector h(cfg.grid.ref_design);
  for (int m = 0; m < cfg.grid.ref_design; ++m) {
    const Vector& x = design[static_cast<std::size_t>(m)];
    for (int j = 0; j < 5; ++j) {
      phi(m, j) = highdim_basis(j, x);
      g(m, j) = truth.g(j, x);
    }
    h(m) = truth.h(x);
  }
  Matrix gram = phi.transpose() * phi;
  gram.diagonal().array() += cfg.grid.ridge;
  PdFactor gram_f(gram);
  const Matrix w_map = gram_f.solve(Matrix(phi.transpose() * g));
  const Vector w0 = gram_f.solve(Vector(phi.transpose() * (0.4 * h)));

  std::vector<StreamRecord> records;
  records.reserve(coeffs.size());
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    StreamRecord rec;
    rec.batch_index = static_cast<int>(b);
    rec.is_changepoint = coeffs[b].is_changepoint;
    rec.latent_coeff = coeffs[b].target;
    rec.projected_target = w_map * coeffs[b].target + w0;
    rec.inputs.resize(static_cast<std::size_t>(cfg.batch_size), Vector(20));
    rec.observations = Vector(cfg.batch_size);
    for (int k = 0; k < cfg.batch_size; ++k) {
      Vector& x = rec.inputs[static_cast<std::size_t>(k)];
      for (int d = 0; d < 20; ++d) x(d) = input_rng.uniform();
      rec.observations(k) = truth.zeta(coeffs[b].target, x) + cfg.noise_sd * noise_rng.normal();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<TrajectoryPoint> gen_trajectory(const StreamConfig& cfg) {
  cfg.validate();
  if (is_highdim(cfg.family))
    return highdim_coeff_trajectory(cfg, HighdimTruth{Rng(derive_seed(cfg.seed, "physical"))});
  return scalar_trajectory(cfg);
}

std::vector<StreamRecord> gen_stream(const StreamConfig& cfg) {
  cfg.validate();
  return is_highdim(cfg.family) ? gen_stream_highdim(cfg) : gen_stream_synthetic1d(cfg);
}

// --- CSV / JSON ------------------------------------------------------------

namespace {

std::string join_semicolon(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    os << v(i);
  }
  return os.str();
}

Vector split_semicolon(const std::string& s) {
  if (s.empty()) return Vector(0);
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) vals.push_back(std::stod(tok));
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

}  // namespace

void write_stream_csv(const std::string& path, const std::vector<StreamRecord>& records) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out.precision(17);
  out << "batch,obs_index,x,y,theta_dagger,omega_or_coeff,is_changepoint\n";
  for (const auto& rec : records) {
    const std::string theta = join_semicolon(rec.projected_target);
    const std::string latent = rec.latent_coeff.size() > 0 ? join_semicolon(rec.latent_coeff)
                                                           : join_semicolon(Vector::Constant(1, rec.latent_omega));
    for (std::size_t k = 0; k < rec.inputs.size(); ++k) {
      out << rec.batch_index << ',' << k << ',' << join_semicolon(rec.inputs[k]) << ','
          << rec.observations(static_cast<Eigen::Index>(k)) << ',' << theta << ',' << latent
          << ',' << (rec.is_changepoint ? 1 : 0) << '\n';
    }
  }
}

std::vector<StreamRecord> read_stream_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<StreamRecord> records;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string batch_s, obs_s, x_s, y_s, theta_s, latent_s, cp_s;
    std::getline(ss, batch_s, ',');
    std::getline(ss, obs_s, ',');
    std::getline(ss, x_s, ',');
    std::getline(ss, y_s, ',');
    std::getline(ss, theta_s, ',');
    std::getline(ss, latent_s, ',');
    std::getline(ss, cp_s, ',');
    const int batch = std::stoi(batch_s);
    if (records.empty() || records.back().batch_index != batch) {
      if (!records.empty()) {
        records.back().observations = Vector::Map(ys.data(), static_cast<Eigen::Index>(ys.size()));
        ys.clear();
      }
      StreamRecord rec;
      rec.batch_index = batch;
      rec.projected_target = split_semicolon(theta_s);
      const Vector latent = split_semicolon(latent_s);
      if (latent.size() == 1)
        rec.latent_omega = latent(0);
      else
        rec.latent_coeff = latent;
      rec.is_changepoint = cp_s == "1";
      records.push_back(std::move(rec));
    }
    records.back().inputs.push_back(split_semicolon(x_s));
    ys.push_back(std::stod(y_s));
  }
  if (!records.empty())
    records.back().observations = Vector::Map(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return records;
}

std::string stream_config_to_json(const StreamConfig& cfg) {
  nlohmann::json j;
  j["family"] = family_name(cfg.family);
  j["total_obs"] = cfg.total_obs;
  j["batch_size"] = cfg.batch_size;
  j["noise_sd"] = cfg.noise_sd;
  j["theta0"] = cfg.theta0;
  j["drift_slope"] = cfg.drift_slope;
  j["segment_len"] = cfg.segment_len;
  j["jump_set"] = cfg.jump_set;
  j["mixed_drift"] = cfg.mixed_drift;
  j["mixed_jump_set"] = cfg.mixed_jump_set;
  j["ar_coeff"] = cfg.ar_coeff;
  j["perturb_sd"] = cfg.perturb_sd;
  j["theta_lo"] = cfg.theta_lo;
  j["theta_hi"] = cfg.theta_hi;
  j["min_jump"] = cfg.min_jump;
  j["cp_jitter"] = cfg.cp_jitter;
  j["omega_lo"] = cfg.omega_lo;
  j["omega_hi"] = cfg.omega_hi;
  j["omega_grid"] = cfg.omega_grid;
  j["highdim_sudden_jump"] = cfg.highdim_sudden_jump;
  j["highdim_mixed_jump"] = cfg.highdim_mixed_jump;
  j["grid"] = {{"theta_grid", cfg.grid.theta_grid}, {"theta_lo", cfg.grid.theta_lo},
               {"theta_hi", cfg.grid.theta_hi},     {"x_grid", cfg.grid.x_grid},
               {"x_lo", cfg.grid.x_lo},             {"x_hi", cfg.grid.x_hi},
               {"ridge", cfg.grid.ridge},           {"ref_design", cfg.grid.ref_design}};
  j["seed"] = cfg.seed;
  return j.dump(2);
}

StreamConfig stream_config_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  StreamConfig cfg;
  cfg.family = family_from_name(j.value("family", family_name(cfg.family)));
  cfg.total_obs = j.value("total_obs", cfg.total_obs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.noise_sd = j.value("noise_sd", cfg.noise_sd);
  cfg.theta0 = j.value("theta0", cfg.theta0);
  cfg.drift_slope = j.value("drift_slope", cfg.drift_slope);
  cfg.segment_len = j.value("segment_len", cfg.segment_len);
  if (j.contains("jump_set")) cfg.jump_set = j["jump_set"].get<std::vector<double>>();
  cfg.mixed_drift = j.value("mixed_drift", cfg.mixed_drift);
  if (j.contains("mixed_jump_set"))
    cfg.mixed_jump_set = j["mixed_jump_set"].get<std::vector<double>>();
  cfg.ar_coeff = j.value("ar_coeff", cfg.ar_coeff);
  cfg.perturb_sd = j.value("perturb_sd", cfg.perturb_sd);
  cfg.theta_lo = j.value("theta_lo", cfg.theta_lo);
  cfg.theta_hi = j.value("theta_hi", cfg.theta_hi);
  cfg.min_jump = j.value("min_jump", cfg.min_jump);
  cfg.cp_jitter = j.value("cp_jitter", cfg.cp_jitter);
  cfg.omega_lo = j.value("omega_lo", cfg.omega_lo);
  cfg.omega_hi = j.value("omega_hi", cfg.omega_hi);
  cfg.omega_grid = j.value("omega_grid", cfg.omega_grid);
  cfg.highdim_sudden_jump = j.value("highdim_sudden_jump", cfg.highdim_sudden_jump);
  cfg.highdim_mixed_jump = j.value("highdim_mixed_jump", cfg.highdim_mixed_jump);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid.theta_grid = g.value("theta_grid", cfg.grid.theta_grid);
    cfg.grid.theta_lo = g.value("theta_lo", cfg.grid.theta_lo);
    cfg.grid.theta_hi = g.value("theta_hi", cfg.grid.theta_hi);
    cfg.grid.x_grid = g.value("x_grid", cfg.grid.x_grid);
    cfg.grid.x_lo = g.value("x_lo", cfg.grid.x_lo);
    cfg.grid.x_hi = g.value("x_hi", cfg.grid.x_hi);
    cfg.grid.ridge = g.value("ridge", cfg.grid.ridge);
    cfg.grid.ref_design = g.value("ref_design", cfg.grid.ref_design);
  }
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace brpc
