#pragma once

#include "brpc/engine.hpp"

namespace brpc {

struct ScenarioSpec {
  std::string id;
  StreamConfig stream;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 20240817;
  int num_seeds = 5;
  bool diagnostics = false;
  std::string output_dir = "out";
  std::vector<ScenarioSpec> scenarios;
  std::vector<MethodSpec> methods;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Paper-default configuration: the three 1-D synthetic families with the
/// full method roster.
ExperimentConfig default_experiment();

/// Seed plumbing (counter-based): changing one run's position never changes
/// another run's seed.
std::uint64_t run_seed(std::uint64_t master, const std::string& scenario_id,
                       const std::string& method_id, int seed_index);
std::uint64_t stream_seed(std::uint64_t master, const std::string& scenario_id, int seed_index);

/// One row of the per-run summary table.
struct SummaryRow {
  std::string scenario;
  std::string method;
  int seed_index = 0;
  double theta_rmse = 0.0;
  double theta_crps = 0.0;
  double y_rmse = 0.0;
  double y_crps = 0.0;
  int restarts = 0;
  double precision2 = 0.0;
  double recall2 = 0.0;
  double f1_2 = 0.0;
  double delay2 = 0.0;
  bool has_precision = true;
  bool has_delay = true;
  double runtime_s = 0.0;
};

SummaryRow summarize_run(const RunLog& log, const std::string& scenario, int seed_index);

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::vector<std::string> failures;  // "scenario/method/seed: message"
  bool all_succeeded() const { return failures.empty(); }
};

/// Execute the full sweep with `jobs` worker threads (1 = serial); writes
/// runs.csv, summary.csv, manifest.json and per-run replay descriptors under
/// output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// In-memory sweep without touching the filesystem (used by tests).
ExperimentResult run_experiment_in_memory(const ExperimentConfig& cfg, int jobs = 1);

void write_runs_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_runs_csv(const std::string& path);

/// Aggregate mean +/- sd per scenario x method; returns the CSV text.
std::string aggregate_summary(const std::vector<SummaryRow>& rows);

/// Small per-run descriptor with everything needed to replay the run
/// bit-exactly (stream config, method spec, seed).
struct ReplayDescriptor {
  ScenarioSpec scenario;
  MethodSpec method;
  int seed_index = 0;
  std::uint64_t master_seed = 0;
};

std::string replay_descriptor_to_json(const ReplayDescriptor& d);
ReplayDescriptor replay_descriptor_from_json(const std::string& json_text);

/// Re-execute a recorded run with diagnostics enabled and return the log.
RunLog replay_run(const ReplayDescriptor& d, bool force_diagnostics);

std::string method_spec_to_json(const MethodSpec& spec);
MethodSpec method_spec_from_json(const std::string& json_text);

}  // namespace brpc
