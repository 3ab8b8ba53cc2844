// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tmig/eviction.hpp"

namespace tmig {

/// Start of the latest free slot on the entry's channel that still ends by
/// the period end. The entry's own reservation (owner) is ignored.
Micros latest_safe_prefetch_time(const PlannedEviction& entry, std::int64_t owner,
                                 const ChannelReservations& reservations,
                                 const DeviceConfig& config);

/// Fills latest_safe_us for every entry and resets scheduled_us to the
/// current prefetch start.
void assign_latest_safe(MigrationPlan& plan, const ChannelReservations& reservations,
                        const DeviceConfig& config);

/// Moves prefetches earlier where GPU headroom allows. Entries are visited by
/// (latest_safe_us, tensor id); each one moves to the earliest free slot
/// after which the tensor fits under capacity up to its current start.
/// Updates pressure and reservations in place.
void eager_reschedule(MigrationPlan& plan, PeriodicCurve& pressure,
                      ChannelReservations& reservations, const DeviceConfig& config);

}  // namespace tmig
