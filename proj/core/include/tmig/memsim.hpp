// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "tmig/config.hpp"
#include "tmig/program.hpp"
#include "tmig/trace.hpp"

namespace tmig {

struct KernelRun {
  int index = 0;  // kernel index within the iteration
  int iteration = 0;
  Micros launch_us = 0;  // previous kernel's end
  Micros start_us = 0;
  Micros end_us = 0;
  Micros stall_us = 0;
  double slowdown = 1.0;  // (duration + stall) / duration
};

struct TrafficBreakdown {
  Bytes ssd_read = 0;
  Bytes ssd_write = 0;
  Bytes host_in = 0;
  Bytes host_out = 0;
  friend bool operator==(const TrafficBreakdown&, const TrafficBreakdown&) = default;
};

struct TransferRecord {
  TensorId tensor_id = 0;
  ChannelKind channel = ChannelKind::Host;
  Direction direction = Direction::ToDevice;
  bool priority = false;  // demand fault or fault-driven eviction
  bool fault = false;
  Micros enqueue_us = 0;
  Micros start_us = 0;
  Micros end_us = 0;
  Bytes bytes = 0;
};

struct SimResult {
  Micros total_us = 0;
  Micros ideal_us = 0;
  Micros compute_us = 0;
  Micros overlapped_migration_us = 0;
  Micros stall_us = 0;
  std::vector<KernelRun> kernels;
  TrafficBreakdown traffic;
  std::int64_t fault_count = 0;
  Micros fault_stall_us = 0;
  Bytes peak_gpu_bytes = 0;
  // Unrounded byte counters, for conservation checks.
  Bytes raw_to_gpu = 0;
  Bytes raw_from_gpu = 0;
  Bytes raw_ssd_read = 0;
  Bytes raw_host_in = 0;
  Bytes raw_ssd_write = 0;
  Bytes raw_host_out = 0;
  Bytes initial_load_bytes = 0;
  std::uint64_t event_log_hash = 0;
  std::vector<TransferRecord> transfers;  // completed, in completion order

  [[nodiscard]] double normalized_throughput() const {
    return total_us > 0 ? static_cast<double>(ideal_us) / static_cast<double>(total_us) : 1.0;
  }
};

/// Runtime policy callbacks. One instance per simulation.
class SimHooks {
 public:
  virtual ~SimHooks() = default;
  virtual void on_fault(int iteration, int kernel, TensorId tensor) {
    (void)iteration, (void)kernel, (void)tensor;
  }
  /// Tensors to prefetch when the given kernel starts.
  virtual std::vector<TensorId> prefetch_at_start(int iteration, int kernel) {
    (void)iteration, (void)kernel;
    return {};
  }
};

struct SimOptions {
  bool allow_host = true;  // may the LRU fallback evict to host memory
  SimHooks* hooks = nullptr;
};

/// Replays program for config.num_iterations iterations. Kernel durations,
/// tensor sizes and uses come from `actual`; instruction timing comes from
/// the program's own kernel durations. Throws ProgramInconsistent and
/// CapacityViolation (a kernel whose tensors exceed GPU memory).
SimResult simulate(const Program& program, const WorkloadTrace& actual, const DeviceConfig& config,
                   const SimOptions& options = {});

/// Unlimited GPU memory: kernels back to back, no traffic.
SimResult ideal_run(const WorkloadTrace& trace, const DeviceConfig& config);

/// Scales each duration by an independent U[1 - pct, 1 + pct] factor,
/// rounded, at least 1 us. Throws InvalidParams unless 0 <= pct < 1.
WorkloadTrace perturb_durations(const WorkloadTrace& trace, double pct, std::uint64_t seed);

}  // namespace tmig
