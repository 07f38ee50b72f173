#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brpc/experiment.hpp"
#include "brpc/metrics.hpp"

namespace py = pybind11;

namespace {

std::vector<brpc::StreamRecord> generate_stream_py(const std::string& config_json) {
  return brpc::gen_stream(brpc::stream_config_from_json(config_json));
}

brpc::RunLog run_method_py(const std::string& method_json, const std::string& stream_json,
                           std::uint64_t seed) {
  const brpc::MethodSpec spec = brpc::method_spec_from_json(method_json);
  const brpc::StreamConfig cfg = brpc::stream_config_from_json(stream_json);
  const auto stream = brpc::gen_stream(cfg);
  return brpc::run_method_on_stream(spec, stream, cfg.simulator(), seed);
}

}  // namespace

PYBIND11_MODULE(_brpc, m) {
  m.doc() = "Streaming Bayesian calibration: projected particle filtering with "
            "recursive GP discrepancy learning";

  py::register_exception<brpc::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<brpc::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<brpc::StreamRecord>(m, "StreamRecord")
      .def_readonly("batch_index", &brpc::StreamRecord::batch_index)
      .def_readonly("inputs", &brpc::StreamRecord::inputs)
      .def_readonly("observations", &brpc::StreamRecord::observations)
      .def_readonly("projected_target", &brpc::StreamRecord::projected_target)
      .def_readonly("is_changepoint", &brpc::StreamRecord::is_changepoint);

  py::class_<brpc::RunLogEntry>(m, "RunLogEntry")
      .def_readonly("batch_index", &brpc::RunLogEntry::batch_index)
      .def_readonly("theta_hat", &brpc::RunLogEntry::theta_hat)
      .def_readonly("theta_truth", &brpc::RunLogEntry::theta_truth)
      .def_readonly("pre_log_density", &brpc::RunLogEntry::pre_log_density)
      .def_readonly("restarted", &brpc::RunLogEntry::restarted)
      .def_readonly("is_changepoint", &brpc::RunLogEntry::is_changepoint);

  py::class_<brpc::RunLog>(m, "RunLog")
      .def_readonly("scenario", &brpc::RunLog::scenario)
      .def_readonly("method", &brpc::RunLog::method)
      .def_readonly("failed", &brpc::RunLog::failed)
      .def_readonly("failure", &brpc::RunLog::failure)
      .def_readonly("entries", &brpc::RunLog::entries)
      .def("restart_batches", &brpc::RunLog::restart_batches)
      .def("changepoint_batches", &brpc::RunLog::changepoint_batches)
      .def("theta_rmse", [](const brpc::RunLog& log) { return brpc::theta_rmse(log); })
      .def("y_rmse", [](const brpc::RunLog& log) { return brpc::y_rmse(log); });

  py::class_<brpc::EventMetrics>(m, "EventMetrics")
      .def_readonly("precision", &brpc::EventMetrics::precision)
      .def_readonly("recall", &brpc::EventMetrics::recall)
      .def_readonly("f1", &brpc::EventMetrics::f1)
      .def_readonly("mean_delay", &brpc::EventMetrics::mean_delay)
      .def_readonly("has_precision", &brpc::EventMetrics::has_precision)
      .def_readonly("has_delay", &brpc::EventMetrics::has_delay);

  m.def("generate_stream", &generate_stream_py, py::arg("config_json"),
        "Generate a synthetic benchmark stream from a JSON stream config");
  m.def("run_method", &run_method_py, py::arg("method_json"), py::arg("stream_json"),
        py::arg("seed"),
        "Generate a stream and run one calibration method over it");
  m.def(
      "event_metrics",
      [](std::vector<int> restarts, std::vector<int> cps, int tol) {
        return brpc::event_metrics(std::move(restarts), std::move(cps), tol);
      },
      py::arg("restarts"), py::arg("changepoints"), py::arg("tol") = 2);
  m.def(
      "crps_gaussian_mixture",
      [](double y, const std::vector<double>& w, const std::vector<double>& mu,
         const std::vector<double>& sd) { return brpc::crps_gaussian_mixture(w, mu, sd, y); },
      py::arg("y"), py::arg("weights"), py::arg("means"), py::arg("sds"));
  m.def("default_experiment_json",
        []() { return brpc::experiment_config_to_json(brpc::default_experiment()); });
  m.def(
      "run_experiment",
      [](const std::string& config_json, int jobs) {
        const auto cfg = brpc::experiment_config_from_json(config_json);
        const auto result = brpc::run_experiment_in_memory(cfg, jobs);
        return std::make_pair(brpc::aggregate_summary(result.rows), result.failures);
      },
      py::arg("config_json"), py::arg("jobs") = 1,
      "Run a sweep in memory; returns (summary_csv, failures)");
}
