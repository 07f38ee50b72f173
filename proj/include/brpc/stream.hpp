#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brpc/gaussian.hpp"
#include "brpc/rng.hpp"

namespace brpc {

enum class SimulatorKind { Synthetic1d, HighdimLinear };

struct SimulatorSpec {
  SimulatorKind kind = SimulatorKind::Synthetic1d;

  int theta_dim() const { return kind == SimulatorKind::Synthetic1d ? 1 : 5; }
  int input_dim() const { return kind == SimulatorKind::Synthetic1d ? 1 : 20; }
};

double simulator_eval(const SimulatorSpec& spec, const Vector& x, const Vector& theta);

/// Grids used by the L2 projection of a physical response onto the simulator
/// family.
struct GridConfig {
  int theta_grid = 600;
  double theta_lo = 0.0;
  double theta_hi = 3.0;
  int x_grid = 400;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double ridge = 1e-6;       // highdim ridge projection
  int ref_design = 50000;    // highdim low-discrepancy reference design size

  double theta_spacing() const { return (theta_hi - theta_lo) / (theta_grid - 1); }
};

/// L2 projection of a physical response onto the simulator family.
/// synthetic1d: grid argmin (ties -> lowest index). highdim: closed-form
/// ridge projection on a low-discrepancy reference design.
Vector projected_target(const SimulatorSpec& spec,
                        const std::function<double(const Vector&)>& physical_fn,
                        const GridConfig& grid);

enum class StreamFamily {
  Drifting,
  Sudden,
  Mixed,
  Stationary,
  HighdimDrifting,
  HighdimSudden,
  HighdimMixed,
};

bool is_highdim(StreamFamily f);
std::string family_name(StreamFamily f);
StreamFamily family_from_name(const std::string& name);

struct StreamConfig {
  StreamFamily family = StreamFamily::Drifting;
  int total_obs = 600;
  int batch_size = 20;
  double noise_sd = 0.2;

  // target-trajectory parameters (synthetic1d)
  double theta0 = 1.5;
  double drift_slope = 1e-3;           // drifting family, per batch
  int segment_len = 160;               // sudden family, in observations
  std::vector<double> jump_set = {0.5, 1.0};   // sudden jump magnitudes
  double mixed_drift = 0.009;          // mixed segment drift per batch
  std::vector<double> mixed_jump_set = {0.28, 0.38, 0.58};
  double ar_coeff = 0.65;              // mixed AR(1) perturbation
  double perturb_sd = 0.015;
  double theta_lo = 1.0;               // admissible target range
  double theta_hi = 2.5;
  double min_jump = 0.15;              // floor on realized jump at annotated changepoints
  int cp_jitter = 2;                   // mixed changepoint jitter, in batches

  // omega inversion grid (synthetic1d)
  double omega_lo = 0.5;
  double omega_hi = 25.0;
  int omega_grid = 2000;

  // highdim trajectory parameters
  double highdim_sudden_jump = 1.2;
  double highdim_mixed_jump = 1.0;

  GridConfig grid;
  std::uint64_t seed = 0;

  SimulatorSpec simulator() const {
    return {is_highdim(family) ? SimulatorKind::HighdimLinear : SimulatorKind::Synthetic1d};
  }
  int num_batches() const { return total_obs / batch_size; }
  void validate() const;
};

/// Algorithm-facing view of one batch: inputs and observations only.
struct Batch {
  std::vector<Vector> inputs;
  Vector observations;

  SupportSet support() const { return SupportSet(inputs); }
  int size() const { return static_cast<int>(inputs.size()); }
};

struct StreamRecord {
  int batch_index = 0;
  std::vector<Vector> inputs;
  Vector observations;
  double latent_omega = 0.0;   // synthetic1d
  Vector latent_coeff;         // highdim
  Vector projected_target;
  bool is_changepoint = false;

  Batch batch() const { return {inputs, observations}; }
};

struct TrajectoryPoint {
  Vector target;
  bool is_changepoint = false;
};

/// Ground-truth projected-target path with annotated changepoint flags.
std::vector<TrajectoryPoint> gen_trajectory(const StreamConfig& cfg);

/// Full benchmark stream. Deterministic given cfg (including seed).
std::vector<StreamRecord> gen_stream(const StreamConfig& cfg);

/// Precomputed map from the physical-response parameter omega to its
/// projected calibration target (synthetic1d).
class OmegaMap {
 public:
  explicit OmegaMap(const StreamConfig& cfg);
  /// Nearest projected target; ties resolved toward lower omega.
  void invert(double target, double& omega, double& realized_target) const;

 private:
  std::vector<double> omegas_;
  std::vector<double> targets_;
};

// --- CSV / JSON interfaces -------------------------------------------------

/// Columns: batch, obs_index, x (semicolon-joined), y, theta_dagger
/// (semicolon-joined), omega_or_coeff, is_changepoint.
void write_stream_csv(const std::string& path, const std::vector<StreamRecord>& records);
std::vector<StreamRecord> read_stream_csv(const std::string& path);

std::string stream_config_to_json(const StreamConfig& cfg);
StreamConfig stream_config_from_json(const std::string& json_text);

}  // namespace brpc
