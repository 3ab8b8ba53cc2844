// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/pipeline.hpp"

namespace tmig {

PlanBundle plan_migrations(const WorkloadTrace& trace, const DeviceConfig& config,
                           const PlannerOptions& options) {
  config.validate();
  PlanBundle out;
  out.analysis = analyze_trace(trace, options.min_period_us);
  auto sched = schedule_evictions(trace, out.analysis, config, options);
  out.plan = std::move(sched.plan);
  out.state = std::move(sched.state);
  assign_latest_safe(out.plan, out.state.reservations, config);
  if (options.eager_prefetch) {
    eager_reschedule(out.plan, out.state.pressure, out.state.reservations, config);
  }
  out.program = emit_program(out.plan, trace, out.analysis.lifetimes, out.analysis.timeline);
  return out;
}

Program plain_program(const WorkloadTrace& trace) {
  const auto timeline = build_timeline(trace);
  MigrationPlan empty;
  empty.iteration_us = timeline.total_us;
  return emit_program(empty, trace, compute_lifetimes(trace), timeline);
}

}  // namespace tmig
