// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/cli/oracle.hpp"

#include <algorithm>

namespace tmig::cli {

OracleResult run_brute_force(const WorkloadTrace& trace, const DeviceConfig& config,
                             const PlannerOptions& options, std::size_t max_periods) {
  config.validate();
  OracleResult out;
  const auto analysis = analyze_trace(trace, options.min_period_us);
  auto periods = analysis.periods;
  out.periods = periods.size();
  if (periods.size() > max_periods) {
    throw Error(ErrorCode::InvalidParams, "instance has " + std::to_string(periods.size()) +
                                              " inactive periods; limit is " +
                                              std::to_string(max_periods));
  }
  std::sort(periods.begin(), periods.end(), [](const auto& a, const auto& b) {
    if (a.start_us != b.start_us) return a.start_us < b.start_us;
    return a.tensor_id < b.tensor_id;
  });

  const SimOptions sim_opts{options.allow_host, nullptr};
  const auto greedy = plan_migrations(trace, config, options);
  out.greedy_plan = greedy.plan;
  out.greedy_us = simulate(greedy.program, trace, config, sim_opts).total_us;
  out.optimal_us = out.greedy_us;
  out.best_plan = greedy.plan;

  const std::size_t choices = options.allow_host ? 3 : 2;
  std::vector<std::size_t> pick(periods.size(), 0);
  while (true) {
    SchedulerState state(trace, analysis);
    bool feasible = true;
    for (std::size_t i = 0; i < periods.size() && feasible; ++i) {
      if (pick[i] == 0) continue;
      const auto dest = pick[i] == 1 ? Destination::Ssd : Destination::Host;
      const auto c =
          score_candidate(periods[i], trace.tensor(periods[i].tensor_id).size_bytes, dest, state,
                          config);
      if (!c) {
        feasible = false;
        break;
      }
      apply(state, *c, config);
    }
    if (feasible) {
      MigrationPlan plan;
      plan.iteration_us = state.period;
      for (const auto& c : state.accepted) plan.evictions.push_back({c, c.prefetch.begin, c.prefetch.begin});
      assign_latest_safe(plan, state.reservations, config);
      if (options.eager_prefetch) eager_reschedule(plan, state.pressure, state.reservations, config);
      plan.residual_overflow =
          state.period > 0 ? state.pressure.overflow_integral(config.gpu_mem_bytes) : 0;
      const auto program = emit_program(plan, trace, analysis.lifetimes, analysis.timeline);
      const Micros total = simulate(program, trace, config, sim_opts).total_us;
      ++out.plans_simulated;
      if (total < out.optimal_us) {
        out.optimal_us = total;
        out.best_plan = std::move(plan);
      }
    }
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == choices) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  out.ratio = out.optimal_us > 0
                  ? static_cast<double>(out.greedy_us) / static_cast<double>(out.optimal_us)
                  : 1.0;
  return out;
}

}  // namespace tmig::cli
