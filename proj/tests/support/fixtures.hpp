// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "tmig/analysis.hpp"
#include "tmig/config.hpp"
#include "tmig/trace.hpp"

namespace tmig::testing {

inline constexpr Bytes kKiB = 1024;

/// Four 25 us kernels: W (global, K0 and K3), P (K1, K2), Q (K1..K3) and,
/// when with_r, R (K0 output, K3 input).
inline WorkloadTrace tiny_trace(bool with_r) {
  std::vector<TensorDescriptor> tensors{
      {0, 40 * kKiB, TensorKind::Global},
      {1, 50 * kKiB, TensorKind::Intermediate},
      {2, 30 * kKiB, TensorKind::Intermediate},
  };
  std::vector<KernelRecord> kernels{
      {0, "K0", 25, {0}, {}},
      {1, "K1", 25, {}, {1, 2}},
      {2, "K2", 25, {1, 2}, {}},
      {3, "K3", 25, {0, 2}, {}},
  };
  if (with_r) {
    tensors.push_back({3, 20 * kKiB, TensorKind::Intermediate});
    kernels[0].outputs.push_back(3);
    kernels[3].inputs.push_back(3);
  }
  return WorkloadTrace(tensors, kernels, {{"model", "tiny"}});
}

/// SSD 4 KiB/us with 5 us latency, host link 8 KiB/us with 1 us latency.
inline DeviceConfig tiny_config() {
  DeviceConfig c;
  c.gpu_mem_bytes = 100 * kKiB;
  c.host_mem_bytes = 1'000'000;
  c.ssd_read_bw = 4.096;
  c.ssd_write_bw = 4.096;
  c.ssd_read_latency_us = 5;
  c.ssd_write_latency_us = 5;
  c.pcie_bw = 8.192;
  c.pcie_latency_us = 1;
  return c;
}

/// Largest set of bytes any single kernel touches.
inline Bytes max_working_set(const WorkloadTrace& trace) {
  Bytes best = 0;
  for (const auto& k : trace.kernels()) {
    std::vector<TensorId> ids = k.inputs;
    ids.insert(ids.end(), k.outputs.begin(), k.outputs.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Bytes sum = 0;
    for (TensorId id : ids) sum += trace.tensor(id).size_bytes;
    best = std::max(best, sum);
  }
  return best;
}

/// Peak of the no-eviction pressure curve.
inline Bytes peak_footprint(const WorkloadTrace& trace) {
  const auto a = analyze_trace(trace);
  return a.timeline.total_us > 0 ? a.pressure.max_over({0, a.timeline.total_us}) : 0;
}

/// A synthetic training trace plus a GPU capacity that is oversubscribed by
/// `ratio` relative to the peak footprint but still fits every kernel.
struct Instance {
  WorkloadTrace trace;
  DeviceConfig config;
};

inline Instance oversubscribed_instance(std::uint64_t seed, int layers, double ratio,
                                        const SynthParams& base = {}) {
  SynthParams p = base;
  p.layers = layers;
  p.seed = seed;
  Instance inst{synthesize_trace(p), DeviceConfig{}};
  const Bytes peak = peak_footprint(inst.trace);
  const auto target = static_cast<Bytes>(static_cast<double>(peak) / ratio);
  inst.config.gpu_mem_bytes = std::max(target, max_working_set(inst.trace));
  return inst;
}

}  // namespace tmig::testing
