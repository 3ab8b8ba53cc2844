// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/baselines.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace tmig {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Ideal: return "ideal";
    case PolicyKind::BaseUvm: return "base-uvm";
    case PolicyKind::DeepUmLike: return "deepum-like";
    case PolicyKind::FlashNeuronLike: return "flashneuron-like";
    case PolicyKind::G10: return "g10";
    case PolicyKind::G10SsdOnly: return "g10-ssd-only";
  }
  return "ideal";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '_', '-');
  std::transform(norm.begin(), norm.end(), norm.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto k : {PolicyKind::Ideal, PolicyKind::BaseUvm, PolicyKind::DeepUmLike,
                 PolicyKind::FlashNeuronLike, PolicyKind::G10, PolicyKind::G10SsdOnly}) {
    if (norm == to_string(k)) return k;
  }
  return std::nullopt;
}

DeepUmHooks::DeepUmHooks(std::size_t num_kernels, int lookahead)
    : recorded_(num_kernels), lookahead_(std::max(0, lookahead)) {}

void DeepUmHooks::on_fault(int iteration, int kernel, TensorId tensor) {
  if (iteration != 0) return;
  auto& set = recorded_[static_cast<std::size_t>(kernel)];
  if (std::find(set.begin(), set.end(), tensor) == set.end()) set.push_back(tensor);
}

std::vector<TensorId> DeepUmHooks::prefetch_at_start(int iteration, int kernel) {
  if (iteration < 1 || recorded_.empty()) return {};
  const auto last = static_cast<int>(recorded_.size()) - 1;
  const int target = std::min(kernel + lookahead_, last);
  return recorded_[static_cast<std::size_t>(target)];
}

FlashNeuronPlan flashneuron_policy(const WorkloadTrace& trace, const TraceAnalysis& analysis,
                                   const DeviceConfig& config) {
  FlashNeuronPlan out;
  SchedulerState state(trace, analysis);
  out.plan.iteration_us = state.period;

  for (const auto& k : trace.kernels()) {
    std::vector<TensorId> ids = k.inputs;
    ids.insert(ids.end(), k.outputs.begin(), k.outputs.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Bytes active = 0;
    for (TensorId id : ids) active += trace.tensor(id).size_bytes;
    if (active > config.gpu_mem_bytes) out.infeasible = true;
  }

  std::map<TensorId, int> birth;
  for (const auto& lt : analysis.lifetimes) birth[lt.tensor_id] = lt.birth_kernel;
  std::vector<InactivePeriod> order;
  for (const auto& p : analysis.periods) {
    if (analysis.kinds.at(p.tensor_id) == TensorKind::Intermediate) order.push_back(p);
  }
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    const int ba = birth.at(a.tensor_id);
    const int bb = birth.at(b.tensor_id);
    if (ba != bb) return ba < bb;
    if (a.tensor_id != b.tensor_id) return a.tensor_id < b.tensor_id;
    return a.start_us < b.start_us;
  });

  for (const auto& p : order) {
    if (state.period <= 0 || state.pressure.max() <= config.gpu_mem_bytes) break;
    const auto c = score_candidate(p, trace.tensor(p.tensor_id).size_bytes, Destination::Ssd,
                                   state, config);
    if (!c) {
      out.plan.unschedulable.push_back(p);
      continue;
    }
    apply(state, *c, config);
  }
  if (state.period > 0 && state.pressure.max() > config.gpu_mem_bytes) out.infeasible = true;

  for (const auto& c : state.accepted) {
    out.plan.evictions.push_back({c, c.prefetch.begin, c.prefetch.begin});
  }
  assign_latest_safe(out.plan, state.reservations, config);
  out.plan.residual_overflow =
      state.period > 0 ? state.pressure.overflow_integral(config.gpu_mem_bytes) : 0;
  out.program = emit_program(out.plan, trace, analysis.lifetimes, analysis.timeline);
  return out;
}

PolicyRun run_policy(PolicyKind kind, const WorkloadTrace& trace, const DeviceConfig& config,
                     const PolicyOptions& options) {
  config.validate();
  PolicyRun run;
  run.kind = kind;
  const WorkloadTrace actual = perturb_durations(trace, options.noise_pct, options.seed);

  switch (kind) {
    case PolicyKind::Ideal:
      run.result = ideal_run(actual, config);
      break;
    case PolicyKind::BaseUvm: {
      LruHooks hooks;
      run.result = simulate(plain_program(trace), actual, config, {true, &hooks});
      break;
    }
    case PolicyKind::DeepUmLike: {
      DeepUmHooks hooks(trace.num_kernels(), options.deepum_lookahead);
      run.result = simulate(plain_program(trace), actual, config, {true, &hooks});
      break;
    }
    case PolicyKind::FlashNeuronLike: {
      const auto analysis = analyze_trace(trace, options.min_period_us);
      auto fn = flashneuron_policy(trace, analysis, config);
      run.infeasible = fn.infeasible;
      run.result = simulate(fn.program, actual, config, {false, nullptr});
      run.plan = std::move(fn.plan);
      break;
    }
    case PolicyKind::G10:
    case PolicyKind::G10SsdOnly: {
      PlannerOptions po;
      po.min_period_us = options.min_period_us;
      po.eager_prefetch = options.eager_prefetch;
      po.allow_host = kind == PolicyKind::G10;
      auto bundle = plan_migrations(trace, config, po);
      run.result = simulate(bundle.program, actual, config, {po.allow_host, nullptr});
      run.plan = std::move(bundle.plan);
      break;
    }
  }
  return run;
}

}  // namespace tmig
