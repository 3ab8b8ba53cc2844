// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tmig/analysis.hpp"
#include "tmig/eviction.hpp"
#include "tmig/prefetch.hpp"
#include "tmig/program.hpp"

namespace tmig {

struct PlanBundle {
  TraceAnalysis analysis;
  MigrationPlan plan;
  Program program;
  SchedulerState state;  // after evictions and prefetch rescheduling
};

/// analyze -> schedule evictions -> latest-safe prefetch -> optional eager
/// rescheduling -> instrumentation.
PlanBundle plan_migrations(const WorkloadTrace& trace, const DeviceConfig& config,
                           const PlannerOptions& options = {});

/// Alloc/Free only: the program an unmodified runtime would execute.
Program plain_program(const WorkloadTrace& trace);

}  // namespace tmig
