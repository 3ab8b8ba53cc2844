// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/reservations.hpp"

#include <algorithm>

#include "tmig/curve.hpp"

namespace tmig {

namespace {

Micros floor_div(Micros a, Micros b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

}  // namespace

void ChannelReservations::reserve(ChannelKind kind, Direction dir, Window w, std::int64_t owner) {
  if (w.end <= w.begin) return;
  if (period_ <= 0 || w.length() > period_) {
    throw Error(ErrorCode::CapacityViolation, "transfer longer than the iteration");
  }
  if (!is_free(kind, dir, w)) {
    throw Error(ErrorCode::CapacityViolation, "overlapping channel reservation");
  }
  auto& lane = lanes_[index(kind, dir)];
  for (const auto& piece : periodic_pieces(w, period_)) {
    auto pos = std::lower_bound(lane.begin(), lane.end(), piece.begin,
                                [](const Reservation& r, Micros t) { return r.window.begin < t; });
    lane.insert(pos, Reservation{piece, owner});
  }
}

std::size_t ChannelReservations::release(ChannelKind kind, Direction dir, std::int64_t owner) {
  auto& lane = lanes_[index(kind, dir)];
  const auto before = lane.size();
  lane.erase(std::remove_if(lane.begin(), lane.end(),
                            [owner](const Reservation& r) { return r.owner == owner; }),
             lane.end());
  return before - lane.size();
}

std::optional<Window> ChannelReservations::conflict(std::size_t lane_index, Window w,
                                                    std::int64_t ignore_owner,
                                                    bool want_last) const {
  const auto& lane = lanes_[lane_index];
  if (lane.empty() || w.end <= w.begin) return std::nullopt;
  std::optional<Window> found;
  const Micros first_lap = floor_div(w.begin, period_);
  const Micros last_lap = floor_div(w.end - 1, period_);
  for (Micros lap = first_lap; lap <= last_lap; ++lap) {
    const Micros shift = lap * period_;
    const Window local{w.begin - shift, w.end - shift};
    // Intervals are disjoint and sorted, so ends are sorted too.
    auto it = std::upper_bound(lane.begin(), lane.end(), local.begin,
                               [](Micros t, const Reservation& r) { return t < r.window.end; });
    for (; it != lane.end() && it->window.begin < local.end; ++it) {
      if (it->owner == ignore_owner && ignore_owner != kNoOwner) continue;
      const Window abs{it->window.begin + shift, it->window.end + shift};
      if (!found) {
        found = abs;
        if (!want_last) return found;
      } else {
        found = abs;
      }
    }
  }
  return found;
}

bool ChannelReservations::is_free(ChannelKind kind, Direction dir, Window w,
                                  std::int64_t ignore_owner) const {
  if (w.end <= w.begin) return true;
  if (w.length() > period_) return false;
  return !conflict(index(kind, dir), w, ignore_owner, false).has_value();
}

std::optional<Micros> ChannelReservations::earliest_slot(ChannelKind kind, Direction dir,
                                                         Micros from, Micros duration,
                                                         std::int64_t ignore_owner) const {
  if (duration <= 0) return from;
  if (duration > period_) return std::nullopt;
  const std::size_t lane = index(kind, dir);
  Micros s = from;
  while (s <= from + period_) {
    auto hit = conflict(lane, {s, s + duration}, ignore_owner, true);
    if (!hit) return s;
    s = hit->end;
  }
  return std::nullopt;
}

std::optional<Micros> ChannelReservations::latest_slot(ChannelKind kind, Direction dir,
                                                       Micros end_by, Micros duration,
                                                       Micros lower,
                                                       std::int64_t ignore_owner) const {
  if (duration > period_) return std::nullopt;
  const std::size_t lane = index(kind, dir);
  Micros s = end_by - duration;
  while (s >= lower) {
    if (duration <= 0) return s;
    auto hit = conflict(lane, {s, s + duration}, ignore_owner, false);
    if (!hit) return s;
    s = hit->begin - duration;
  }
  return std::nullopt;
}

Micros ChannelReservations::busy_time_within(ChannelKind kind, Direction dir, Window w) const {
  const auto& lane = lanes_[index(kind, dir)];
  Micros busy = 0;
  for (const auto& piece : periodic_pieces(w, period_)) {
    for (const auto& r : lane) {
      const Micros lo = std::max(piece.begin, r.window.begin);
      const Micros hi = std::min(piece.end, r.window.end);
      if (hi > lo) busy += hi - lo;
    }
  }
  return busy;
}

}  // namespace tmig
