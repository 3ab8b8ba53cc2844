// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tmig/config.hpp"
#include "tmig/types.hpp"

namespace tmig {

struct Reservation {
  Window window;  // folded into [0, period)
  std::int64_t owner = 0;
  friend bool operator==(const Reservation&, const Reservation&) = default;
};

/// Busy intervals per (channel, direction) on a periodic timeline. A window
/// may be given anywhere in time; it is stored modulo the period so that a
/// transfer late in one iteration blocks the same slot in every iteration.
class ChannelReservations {
 public:
  static constexpr std::int64_t kNoOwner = -1;

  ChannelReservations() = default;
  explicit ChannelReservations(Micros period) : period_(period) {}

  [[nodiscard]] Micros period() const { return period_; }

  /// Throws CapacityViolation if the window overlaps an existing reservation.
  void reserve(ChannelKind kind, Direction dir, Window w, std::int64_t owner);
  /// Removes every interval of this owner on the lane; returns how many.
  std::size_t release(ChannelKind kind, Direction dir, std::int64_t owner);

  [[nodiscard]] bool is_free(ChannelKind kind, Direction dir, Window w,
                             std::int64_t ignore_owner = kNoOwner) const;

  /// Earliest start s >= from with [s, s + duration) free.
  [[nodiscard]] std::optional<Micros> earliest_slot(ChannelKind kind, Direction dir, Micros from,
                                                    Micros duration,
                                                    std::int64_t ignore_owner = kNoOwner) const;

  /// Latest start s with s + duration <= end_by, s >= lower and the slot free.
  [[nodiscard]] std::optional<Micros> latest_slot(ChannelKind kind, Direction dir, Micros end_by,
                                                  Micros duration, Micros lower,
                                                  std::int64_t ignore_owner = kNoOwner) const;

  /// Reserved time inside w.
  [[nodiscard]] Micros busy_time_within(ChannelKind kind, Direction dir, Window w) const;

  [[nodiscard]] const std::vector<Reservation>& lane(ChannelKind kind, Direction dir) const {
    return lanes_[index(kind, dir)];
  }

  friend bool operator==(const ChannelReservations&, const ChannelReservations&) = default;

 private:
  static std::size_t index(ChannelKind kind, Direction dir) {
    return static_cast<std::size_t>(kind) * 2 + static_cast<std::size_t>(dir);
  }
  /// Some reserved interval (in absolute time) intersecting w, if any.
  [[nodiscard]] std::optional<Window> conflict(std::size_t lane, Window w,
                                               std::int64_t ignore_owner, bool want_last) const;

  Micros period_ = 0;
  std::array<std::vector<Reservation>, 4> lanes_;
};

}  // namespace tmig
