// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tmig/memsim.hpp"
#include "tmig/pipeline.hpp"

namespace tmig {

enum class PolicyKind { Ideal, BaseUvm, DeepUmLike, FlashNeuronLike, G10, G10SsdOnly };

std::string_view to_string(PolicyKind kind);
/// Accepts the to_string names; '_' and '-' are interchangeable.
std::optional<PolicyKind> parse_policy(std::string_view name);

/// Demand paging only; on a fault the least recently used resident tensor is
/// evicted to host memory if it has room, else to the SSD.
class LruHooks : public SimHooks {};

/// Records which tensors fault at each kernel during the first iteration and
/// replays them as prefetches `lookahead` kernels early afterwards.
class DeepUmHooks : public SimHooks {
 public:
  DeepUmHooks(std::size_t num_kernels, int lookahead);
  void on_fault(int iteration, int kernel, TensorId tensor) override;
  std::vector<TensorId> prefetch_at_start(int iteration, int kernel) override;
  [[nodiscard]] const std::vector<std::vector<TensorId>>& recorded() const { return recorded_; }

 private:
  std::vector<std::vector<TensorId>> recorded_;
  int lookahead_;
};

struct FlashNeuronPlan {
  MigrationPlan plan;
  Program program;
  bool infeasible = false;
};

/// Offloads intermediate tensors to the SSD in birth order until planned
/// pressure fits. Weights never move and host memory is never used.
FlashNeuronPlan flashneuron_policy(const WorkloadTrace& trace, const TraceAnalysis& analysis,
                                   const DeviceConfig& config);

struct PolicyOptions {
  double noise_pct = 0.0;  // applied to the simulated trace only
  std::uint64_t seed = 0;
  bool eager_prefetch = true;
  Micros min_period_us = 0;
  int deepum_lookahead = 1;
};

struct PolicyRun {
  PolicyKind kind = PolicyKind::Ideal;
  SimResult result;
  std::optional<MigrationPlan> plan;
  bool infeasible = false;
};

/// Plans on the profiled trace and simulates on the (optionally perturbed)
/// trace.
PolicyRun run_policy(PolicyKind kind, const WorkloadTrace& trace, const DeviceConfig& config,
                     const PolicyOptions& options = {});

}  // namespace tmig
