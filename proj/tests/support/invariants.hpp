// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tmig/baselines.hpp"
#include "tmig/pipeline.hpp"
#include "tmig/plan_io.hpp"

// Property checks shared by the unit tests and the acceptance gate. Each
// check returns an empty string on success, else a description.
namespace tmig::testing {

struct Case {
  WorkloadTrace trace;
  DeviceConfig config;
  PlannerOptions options;
};

/// Small arbitrary trace (not a layer chain) with a capacity between the
/// largest kernel working set and the peak footprint.
inline Case random_case(std::mt19937_64& rng) {
  const auto pick = [&rng](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  const auto n_tensors = pick(2, 8);
  const auto n_kernels = pick(3, 10);
  std::vector<TensorDescriptor> tensors;
  for (TensorId id = 0; id < n_tensors; ++id) {
    const auto kind = static_cast<TensorKind>(pick(0, 4) < 2 ? pick(0, 1) : 2);
    tensors.push_back({id, pick(1, 64) * kKiB, kind});
  }
  std::vector<KernelRecord> kernels;
  for (int k = 0; k < n_kernels; ++k) {
    KernelRecord r{k, "k" + std::to_string(k), pick(5, 60), {}, {}};
    const auto touches = pick(1, 3);
    for (int j = 0; j < touches; ++j) {
      (pick(0, 1) ? r.inputs : r.outputs).push_back(pick(0, n_tensors - 1));
    }
    kernels.push_back(std::move(r));
  }
  Case c{WorkloadTrace(std::move(tensors), std::move(kernels)), DeviceConfig{}, PlannerOptions{}};
  const Bytes ws = max_working_set(c.trace);
  const Bytes peak = std::max(ws, peak_footprint(c.trace));
  c.config.gpu_mem_bytes = pick(ws, peak);
  c.config.host_mem_bytes = pick(0, 1) ? pick(0, peak) : 0;
  c.config.ssd_read_bw = static_cast<double>(pick(1, 16)) * 0.5;
  c.config.ssd_write_bw = static_cast<double>(pick(1, 16)) * 0.5;
  c.config.pcie_bw = static_cast<double>(pick(2, 32)) * 0.5;
  c.config.ssd_read_latency_us = pick(0, 8);
  c.config.ssd_write_latency_us = pick(0, 8);
  c.config.pcie_latency_us = pick(0, 3);
  c.config.fault_handling_us = pick(0, 20);
  c.config.fault_chunk_bytes = pick(1, 16) * c.config.page_size_bytes;
  c.config.num_iterations = static_cast<int>(pick(1, 3));
  c.options.eager_prefetch = pick(0, 1) == 1;
  c.options.allow_host = pick(0, 3) != 0;
  return c;
}

/// Replays the greedy loop by hand and checks that no accepted eviction
/// raises planned pressure at any microsecond.
inline std::string check_pressure_monotone(const Case& c) {
  const auto a = analyze_trace(c.trace, c.options.min_period_us);
  SchedulerState state(c.trace, a);
  const Micros T = state.period;
  while (!state.remaining.empty()) {
    std::vector<EvictionCandidate> cands;
    for (const auto& p : state.remaining) {
      auto choice = choose_destination(p, c.trace.tensor(p.tensor_id).size_bytes, state, c.config,
                                       c.options.allow_host);
      if (choice.candidate) cands.push_back(*choice.candidate);
    }
    const EvictionCandidate* best = nullptr;
    try {
      best = &select_best(cands);
    } catch (const Error&) {
      break;
    }
    const auto chosen = *best;
    std::vector<Bytes> before(static_cast<std::size_t>(T));
    for (Micros t = 0; t < T; ++t) before[static_cast<std::size_t>(t)] = state.pressure.value_at(t);
    apply(state, chosen, c.config);
    for (Micros t = 0; t < T; ++t) {
      if (state.pressure.value_at(t) > before[static_cast<std::size_t>(t)]) {
        return "pressure rose at t=" + std::to_string(t) + " after evicting tensor " +
               std::to_string(chosen.period.tensor_id);
      }
    }
    if (state.pressure.max() <= c.config.gpu_mem_bytes) break;
  }
  return {};
}

inline std::string check_reservations(const ChannelReservations& res) {
  const Micros T = res.period();
  for (ChannelKind kind : {ChannelKind::Host, ChannelKind::Ssd}) {
    for (Direction dir : {Direction::ToDevice, Direction::FromDevice}) {
      std::vector<int> busy(static_cast<std::size_t>(T), 0);
      for (const auto& r : res.lane(kind, dir)) {
        if (r.window.length() > T) return "reservation longer than the period";
        for (Micros t = r.window.begin; t < r.window.end; ++t) {
          const auto slot = static_cast<std::size_t>(((t % T) + T) % T);
          if (++busy[slot] > 1) return "overlapping reservations at t=" + std::to_string(t % T);
        }
      }
    }
  }
  return {};
}

inline std::string check_residency(const SimResult& r, const DeviceConfig& cfg) {
  if (r.peak_gpu_bytes > cfg.gpu_mem_bytes) {
    return "peak residency " + std::to_string(r.peak_gpu_bytes) + " over capacity";
  }
  return {};
}

inline std::string check_conservation(const SimResult& r) {
  if (r.raw_to_gpu != r.raw_ssd_read + r.raw_host_in) return "inbound bytes do not add up";
  if (r.raw_from_gpu != r.raw_ssd_write + r.raw_host_out) return "outbound bytes do not add up";
  std::map<std::pair<ChannelKind, Direction>, Bytes> sums;
  for (const auto& t : r.transfers) sums[{t.channel, t.direction}] += t.bytes;
  if (sums[{ChannelKind::Ssd, Direction::ToDevice}] != r.raw_ssd_read ||
      sums[{ChannelKind::Ssd, Direction::FromDevice}] != r.raw_ssd_write ||
      sums[{ChannelKind::Host, Direction::ToDevice}] != r.raw_host_in ||
      sums[{ChannelKind::Host, Direction::FromDevice}] != r.raw_host_out) {
    return "transfer log disagrees with byte counters";
  }
  return {};
}

/// Per tensor, pre-evicts and prefetches alternate cyclically;
/// intermediates go alloc, (pre_evict prefetch)*, free.
inline std::string check_alternation(const Program& program, const WorkloadTrace& trace) {
  const auto kinds = classify_tensors(trace);
  std::map<TensorId, std::vector<OpKind>> ops;
  for (const auto& slot : program.slots) {
    for (const auto& ins : slot) ops[ins.tensor_id].push_back(ins.op);
  }
  for (const auto& [id, seq] : ops) {
    std::vector<OpKind> moves;
    for (OpKind op : seq) {
      if (op == OpKind::PreEvict || op == OpKind::Prefetch) moves.push_back(op);
    }
    const bool has_alloc = std::count(seq.begin(), seq.end(), OpKind::Alloc) > 0;
    const bool has_free = std::count(seq.begin(), seq.end(), OpKind::Free) > 0;
    if (std::count(seq.begin(), seq.end(), OpKind::Alloc) > 1 ||
        std::count(seq.begin(), seq.end(), OpKind::Free) > 1) {
      return "tensor " + std::to_string(id) + " allocated or freed twice";
    }
    if (has_alloc && seq.front() != OpKind::Alloc) return "alloc is not first";
    if (has_free && seq.back() != OpKind::Free) return "free is not last";
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const OpKind next = moves[(i + 1) % moves.size()];
      if (moves.size() > 1 && next == moves[i]) {
        return "tensor " + std::to_string(id) + " has consecutive " + std::string(to_string(next));
      }
    }
    if (moves.size() % 2 != 0) return "tensor " + std::to_string(id) + " has unpaired migration";
    if (kinds.at(id) == TensorKind::Intermediate && !moves.empty() &&
        moves.front() != OpKind::PreEvict) {
      return "tensor " + std::to_string(id) + " is prefetched before it is evicted";
    }
  }
  return {};
}

inline std::string check_all_invariants(const Case& c) {
  if (auto e = check_pressure_monotone(c); !e.empty()) return "monotonicity: " + e;

  const auto a = plan_migrations(c.trace, c.config, c.options);
  const auto b = plan_migrations(c.trace, c.config, c.options);
  if (plan_to_json(a.plan) != plan_to_json(b.plan) ||
      serialize_program(a.program) != serialize_program(b.program)) {
    return "determinism: plan re-run differs";
  }
  if (auto e = check_reservations(a.state.reservations); !e.empty()) return "reservations: " + e;
  if (auto e = check_alternation(a.program, c.trace); !e.empty()) return "alternation: " + e;

  SimOptions so;
  so.allow_host = c.options.allow_host;
  const auto r1 = simulate(a.program, c.trace, c.config, so);
  const auto r2 = simulate(a.program, c.trace, c.config, so);
  if (r1.event_log_hash != r2.event_log_hash || r1.total_us != r2.total_us) {
    return "determinism: simulation re-run differs";
  }
  const auto base = simulate(plain_program(c.trace), c.trace, c.config);
  for (const auto* r : {&r1, &base}) {
    if (auto e = check_residency(*r, c.config); !e.empty()) return "residency: " + e;
    if (auto e = check_conservation(*r); !e.empty()) return "conservation: " + e;
  }
  return {};
}

}  // namespace tmig::testing
