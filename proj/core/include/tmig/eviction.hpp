// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tmig/analysis.hpp"
#include "tmig/config.hpp"
#include "tmig/curve.hpp"
#include "tmig/reservations.hpp"

namespace tmig {

enum class Destination { Ssd, Host };

ChannelKind channel_of(Destination dest);
std::string_view to_string(Destination dest);

struct EvictionCandidate {
  InactivePeriod period;
  Bytes size_bytes = 0;
  Destination destination = Destination::Ssd;
  Window evict;
  Window prefetch;
  std::int64_t benefit = 0;  // byte-microseconds of overflow removed
  Micros cost_us = 0;

  /// Interval during which the tensor occupies no GPU memory.
  [[nodiscard]] Window freed() const { return {evict.end, prefetch.begin}; }
  friend bool operator==(const EvictionCandidate&, const EvictionCandidate&) = default;
};

/// Strict "a ranks ahead of b": higher benefit/cost, then larger benefit,
/// earlier period start, smaller tensor id.
bool ranks_before(const EvictionCandidate& a, const EvictionCandidate& b);

struct PlannerOptions {
  Micros min_period_us = 0;
  bool eager_prefetch = true;
  bool allow_host = true;
  /// Rescore every remaining period after each accepted eviction instead of
  /// reusing scores the last change could not have affected.
  bool full_rescore = false;
};

struct SchedulerState {
  SchedulerState() = default;
  SchedulerState(const WorkloadTrace& trace, const TraceAnalysis& analysis);

  Micros period = 0;
  PeriodicCurve pressure;
  ChannelReservations reservations;
  PeriodicCurve host_occupancy;
  Bytes ssd_occupancy = 0;
  std::vector<InactivePeriod> remaining;
  std::vector<EvictionCandidate> accepted;
};

/// Earliest eviction slot from the period start and latest prefetch slot
/// ending by the period end on the destination's channel; nullopt when the
/// slots collide, do not exist, or the destination lacks capacity.
std::optional<EvictionCandidate> score_candidate(const InactivePeriod& period, Bytes size,
                                                 Destination dest, const SchedulerState& state,
                                                 const DeviceConfig& config);

struct DestinationChoice {
  enum class Kind { Ssd, Host, Drop };
  Kind kind = Kind::Drop;
  std::optional<EvictionCandidate> candidate;
};

/// SSD unless the SSD is under high pressure for this period (no feasible
/// slot, nothing to gain, or channel utilization over the period above the
/// threshold); then host if it is allowed, feasible and beneficial.
DestinationChoice choose_destination(const InactivePeriod& period, Bytes size,
                                     const SchedulerState& state, const DeviceConfig& config,
                                     bool allow_host = true);

/// Best-ranked candidate with positive benefit. Throws NoBeneficialCandidate.
const EvictionCandidate& select_best(const std::vector<EvictionCandidate>& candidates);

/// Commits a candidate. Throws CapacityViolation if it no longer fits.
void apply(SchedulerState& state, const EvictionCandidate& candidate, const DeviceConfig& config);

struct PlannedEviction {
  EvictionCandidate candidate;
  Micros latest_safe_us = 0;
  Micros scheduled_us = 0;
  friend bool operator==(const PlannedEviction&, const PlannedEviction&) = default;
};

struct MigrationPlan {
  Micros iteration_us = 0;
  std::vector<PlannedEviction> evictions;  // acceptance order
  std::int64_t residual_overflow = 0;
  std::vector<InactivePeriod> unschedulable;
  friend bool operator==(const MigrationPlan&, const MigrationPlan&) = default;
};

struct ScheduleResult {
  MigrationPlan plan;
  SchedulerState state;
};

/// Greedy loop: score all remaining periods, accept the best, repeat until
/// pressure fits, nothing beneficial remains, or periods run out.
/// latest_safe_us and scheduled_us are left at the prefetch start.
ScheduleResult schedule_evictions(const WorkloadTrace& trace, const TraceAnalysis& analysis,
                                  const DeviceConfig& config, const PlannerOptions& options = {});

}  // namespace tmig
