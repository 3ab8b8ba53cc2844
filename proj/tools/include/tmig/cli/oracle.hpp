// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tmig/baselines.hpp"

namespace tmig::cli {

struct OracleResult {
  std::size_t periods = 0;
  Micros greedy_us = 0;
  Micros optimal_us = 0;
  double ratio = 1.0;  // greedy / optimal
  MigrationPlan greedy_plan;
  MigrationPlan best_plan;
  std::size_t plans_simulated = 0;
};

/// Simulates every assignment of {skip, SSD, host} to the trace's inactive
/// periods (host only when allowed), applied in (start, tensor id) order,
/// and reports the fastest next to the greedy plan. The greedy plan itself
/// also counts as a candidate. Throws InvalidParams above max_periods.
OracleResult run_brute_force(const WorkloadTrace& trace, const DeviceConfig& config,
                             const PlannerOptions& options, std::size_t max_periods = 8);

}  // namespace tmig::cli
