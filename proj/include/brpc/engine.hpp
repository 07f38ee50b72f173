#pragma once

#include "brpc/baselines.hpp"
#include "brpc/discrepancy.hpp"
#include "brpc/metrics.hpp"
#include "brpc/restart.hpp"

namespace brpc {

enum class MethodKind {
  BrpcBocpd,     // B-BRPC: BOCPD expert bank with hard restarts
  BrpcBocpdRra,  // B-BRPC-RRA: BOCPD + residual re-anchoring refits
  BrpcWcusum,    // C-BRPC: wCUSUM monitor with state reset
  BrpcNoRestart,
  Bc,
  WardPf,
  Enkf,
};

std::string method_kind_name(MethodKind kind);
MethodKind method_kind_from_name(const std::string& name);

struct MethodSpec {
  std::string id;  // used for seeding and reporting
  MethodKind kind = MethodKind::BrpcWcusum;
  DiscrepancyVariant variant = DiscrepancyVariant::E;

  ThetaFilterConfig theta;
  KernelConfig kernel;  // discrepancy kernel (signal variance 0.01, lengthscale 1)
  DiscrepancyUpdateConfig disc;
  BocpdConfig bocpd;
  WcusumConfig wcusum;
  BcConfig bc;
  WardPfConfig ward;
  EnkfConfig enkf;

  bool diagnostics = false;  // record propagation tuples (single-state BRPC only)
};

/// Run one method over a full stream with the prequential ordering:
/// predict -> score -> restart decision -> assimilate, every batch.
RunLog run_method_on_stream(const MethodSpec& spec, const std::vector<StreamRecord>& stream,
                            const SimulatorSpec& sim, std::uint64_t seed);

}  // namespace brpc
