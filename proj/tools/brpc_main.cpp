#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "brpc/experiment.hpp"
#include "brpc/metrics.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw brpc::InvalidInput("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

brpc::ExperimentConfig load_config(const std::string& path) {
  brpc::ExperimentConfig cfg =
      path.empty() ? brpc::default_experiment() : brpc::experiment_config_from_json(read_file(path));
  if (const char* env = std::getenv("BRPC_SEED")) cfg.master_seed = std::stoull(env);
  return cfg;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
  const brpc::ExperimentConfig cfg = load_config(config_path);
  fs::create_directories(out_dir);
  for (const auto& scenario : cfg.scenarios) {
    brpc::StreamConfig sc = scenario.stream;
    sc.seed = brpc::stream_seed(cfg.master_seed, scenario.id, 0);
    const auto stream = brpc::gen_stream(sc);
    brpc::write_stream_csv((fs::path(out_dir) / (scenario.id + ".csv")).string(), stream);
    std::ofstream sidecar(fs::path(out_dir) / (scenario.id + ".json"));
    sidecar << brpc::stream_config_to_json(sc) << '\n';
    std::cout << scenario.id << ": " << stream.size() << " batches -> "
              << (fs::path(out_dir) / (scenario.id + ".csv")).string() << '\n';
  }
  return 0;
}

int cmd_run(const std::string& config_path, int jobs) {
  brpc::ExperimentConfig cfg = load_config(config_path);
  const brpc::ExperimentResult result = brpc::run_experiment(cfg, jobs);
  std::cout << result.rows.size() << " runs completed, " << result.failures.size()
            << " failed; outputs in " << cfg.output_dir << '\n';
  for (const auto& f : result.failures) std::cerr << "FAILED " << f << '\n';
  return result.all_succeeded() ? 0 : 1;
}

int cmd_summarize(const std::string& in_dir) {
  const auto rows = brpc::read_runs_csv((fs::path(in_dir) / "runs.csv").string());
  const std::string summary = brpc::aggregate_summary(rows);
  std::ofstream out(fs::path(in_dir) / "summary.csv");
  out << summary;
  std::cout << summary;
  return 0;
}

int cmd_replay_gamma(const std::string& run_path) {
  const brpc::ReplayDescriptor d = brpc::replay_descriptor_from_json(read_file(run_path));
  const brpc::RunLog log = brpc::replay_run(d, /*force_diagnostics=*/true);
  if (log.failed) {
    std::cerr << "replay failed: " << log.failure << '\n';
    return 1;
  }
  const brpc::GammaSummary g = brpc::gamma_replay(log);
  std::cout << "run " << log.scenario << "/" << log.method << "/" << log.seed_index << '\n'
            << "gamma_prior: median=" << g.median_prior << " max=" << g.max_prior
            << " frac<=1=" << g.frac_prior_le_1 << '\n'
            << "gamma_post:  median=" << g.median_post << " max=" << g.max_post << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brpc — streaming Bayesian calibration experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "streams", in_dir = "out", run_path;
  int jobs = 1;

  auto* gen = app.add_subcommand("generate", "Generate benchmark streams as CSV");
  gen->add_option("--config", config_path, "Experiment config JSON (defaults built in)");
  gen->add_option("--out", out_dir, "Output directory");

  auto* run = app.add_subcommand("run", "Run the experiment sweep");
  run->add_option("--config", config_path, "Experiment config JSON (defaults built in)");
  run->add_option("--jobs", jobs, "Parallel worker threads")->check(CLI::PositiveNumber);

  auto* sum = app.add_subcommand("summarize", "Aggregate runs.csv into summary.csv");
  sum->add_option("--in", in_dir, "Experiment output directory");

  auto* rg = app.add_subcommand("replay-gamma", "Replay a run and report contraction diagnostics");
  rg->add_option("--run", run_path, "Replay descriptor JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_dir);
    if (run->parsed()) return cmd_run(config_path, jobs);
    if (sum->parsed()) return cmd_summarize(in_dir);
    if (rg->parsed()) return cmd_replay_gamma(run_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
