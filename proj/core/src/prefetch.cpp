// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/prefetch.hpp"

#include <algorithm>
#include <numeric>

namespace tmig {

Micros latest_safe_prefetch_time(const PlannedEviction& entry, std::int64_t owner,
                                 const ChannelReservations& reservations,
                                 const DeviceConfig&) {
  const auto& c = entry.candidate;
  const auto slot =
      reservations.latest_slot(channel_of(c.destination), Direction::ToDevice, c.period.end_us,
                               c.prefetch.length(), c.evict.end, owner);
  // The entry's own window is always free once it is ignored.
  return slot.value_or(c.prefetch.begin);
}

void assign_latest_safe(MigrationPlan& plan, const ChannelReservations& reservations,
                        const DeviceConfig& config) {
  for (std::size_t i = 0; i < plan.evictions.size(); ++i) {
    auto& e = plan.evictions[i];
    e.latest_safe_us =
        latest_safe_prefetch_time(e, static_cast<std::int64_t>(i), reservations, config);
    e.scheduled_us = e.candidate.prefetch.begin;
  }
}

void eager_reschedule(MigrationPlan& plan, PeriodicCurve& pressure,
                      ChannelReservations& reservations, const DeviceConfig& config) {
  std::vector<std::size_t> order(plan.evictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = plan.evictions[a];
    const auto& eb = plan.evictions[b];
    if (ea.latest_safe_us != eb.latest_safe_us) return ea.latest_safe_us < eb.latest_safe_us;
    return ea.candidate.period.tensor_id < eb.candidate.period.tensor_id;
  });

  for (std::size_t idx : order) {
    auto& e = plan.evictions[idx];
    auto& c = e.candidate;
    const auto owner = static_cast<std::int64_t>(idx);
    const Micros current = c.prefetch.begin;
    const Micros duration = c.prefetch.length();
    const Micros low =
        pressure.headroom_start(c.evict.end, current, c.size_bytes, config.gpu_mem_bytes);
    if (low >= current) continue;
    const ChannelKind ch = channel_of(c.destination);
    const auto slot = reservations.earliest_slot(ch, Direction::ToDevice, low, duration, owner);
    if (!slot || *slot >= current) continue;

    reservations.release(ch, Direction::ToDevice, owner);
    reservations.reserve(ch, Direction::ToDevice, {*slot, *slot + duration}, owner);
    pressure.add({*slot, current}, c.size_bytes);
    c.prefetch = {*slot, *slot + duration};
    e.scheduled_us = *slot;
  }
}

}  // namespace tmig
