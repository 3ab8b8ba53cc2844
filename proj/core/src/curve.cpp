// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/curve.hpp"

#include <algorithm>
#include <limits>

namespace tmig {

PressureCurve::PressureCurve(std::vector<Point> points) : points_(std::move(points)) {
  std::stable_sort(points_.begin(), points_.end(),
                   [](const Point& a, const Point& b) { return a.time < b.time; });
  // Later duplicates override earlier ones.
  std::vector<Point> dedup;
  for (const auto& p : points_) {
    if (!dedup.empty() && dedup.back().time == p.time) {
      dedup.back().value = p.value;
    } else {
      dedup.push_back(p);
    }
  }
  points_ = std::move(dedup);
  normalize();
}

void PressureCurve::normalize() {
  std::vector<Point> out;
  out.reserve(points_.size());
  Bytes prev = 0;
  for (const auto& p : points_) {
    if (p.value != prev) {
      out.push_back(p);
      prev = p.value;
    }
  }
  points_ = std::move(out);
}

Bytes PressureCurve::value_at(Micros t) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](Micros v, const Point& p) { return v < p.time; });
  return it == points_.begin() ? 0 : std::prev(it)->value;
}

void PressureCurve::add(Window w, Bytes delta) {
  if (w.end <= w.begin || delta == 0) return;
  const Bytes at_end = value_at(w.end);
  const Bytes at_begin = value_at(w.begin);
  auto lower = std::lower_bound(points_.begin(), points_.end(), w.begin,
                                [](const Point& p, Micros v) { return p.time < v; });
  auto upper = std::lower_bound(lower, points_.end(), w.end,
                                [](const Point& p, Micros v) { return p.time < v; });
  std::vector<Point> mid;
  mid.push_back({w.begin, at_begin + delta});
  for (auto it = lower; it != upper; ++it) {
    if (it->time == w.begin) continue;
    mid.push_back({it->time, it->value + delta});
  }
  const bool has_end = upper != points_.end() && upper->time == w.end;
  if (!has_end) mid.push_back({w.end, at_end});
  const auto pos = points_.erase(lower, upper);
  points_.insert(pos, mid.begin(), mid.end());
  normalize();
}

Bytes PressureCurve::max_over(Window w) const {
  Bytes best = std::numeric_limits<Bytes>::min();
  for_each_segment(w, [&](Window, Bytes v) { best = std::max(best, v); });
  return w.end <= w.begin ? 0 : best;
}

Bytes PressureCurve::min_over(Window w) const {
  Bytes best = std::numeric_limits<Bytes>::max();
  for_each_segment(w, [&](Window, Bytes v) { best = std::min(best, v); });
  return w.end <= w.begin ? 0 : best;
}

std::int64_t PressureCurve::integral(Window w) const {
  std::int64_t sum = 0;
  for_each_segment(w, [&](Window s, Bytes v) { sum += v * s.length(); });
  return sum;
}

std::int64_t PressureCurve::overflow_integral(Window w, Bytes cap, Bytes clamp) const {
  std::int64_t sum = 0;
  for_each_segment(w, [&](Window s, Bytes v) {
    sum += std::min(clamp, std::max<Bytes>(0, v - cap)) * s.length();
  });
  return sum;
}

std::vector<Window> periodic_pieces(Window w, Micros period) {
  std::vector<Window> out;
  if (w.end <= w.begin) return out;
  if (period <= 0) throw Error(ErrorCode::InvalidParams, "period must be > 0");
  Micros lap = w.begin >= 0 ? w.begin / period : -((-w.begin + period - 1) / period);
  Micros t = w.begin;
  while (t < w.end) {
    const Micros lap_end = (lap + 1) * period;
    const Micros stop = std::min(w.end, lap_end);
    out.push_back({t - lap * period, stop - lap * period});
    t = stop;
    ++lap;
  }
  return out;
}

bool periodic_overlap(Window a, Window b, Micros period) {
  for (const auto& pa : periodic_pieces(a, period)) {
    for (const auto& pb : periodic_pieces(b, period)) {
      if (pa.begin < pb.end && pb.begin < pa.end) return true;
    }
  }
  return false;
}

namespace {

Micros floor_mod(Micros t, Micros period) {
  const Micros r = t % period;
  return r < 0 ? r + period : r;
}

}  // namespace

Bytes PeriodicCurve::value_at(Micros t) const {
  return curve_.value_at(floor_mod(t, period_));
}

void PeriodicCurve::add(Window w, Bytes delta) {
  for (const auto& piece : periodic_pieces(w, period_)) curve_.add(piece, delta);
}

Bytes PeriodicCurve::max_over(Window w) const {
  Bytes best = 0;
  bool any = false;
  for (const auto& piece : periodic_pieces(w, period_)) {
    const Bytes m = curve_.max_over(piece);
    best = any ? std::max(best, m) : m;
    any = true;
  }
  return best;
}

Bytes PeriodicCurve::min_over(Window w) const {
  Bytes best = 0;
  bool any = false;
  for (const auto& piece : periodic_pieces(w, period_)) {
    const Bytes m = curve_.min_over(piece);
    best = any ? std::min(best, m) : m;
    any = true;
  }
  return best;
}

std::int64_t PeriodicCurve::overflow_integral(Window w, Bytes cap, Bytes clamp) const {
  std::int64_t sum = 0;
  for (const auto& piece : periodic_pieces(w, period_)) {
    sum += curve_.overflow_integral(piece, cap, clamp);
  }
  return sum;
}

std::int64_t PeriodicCurve::overflow_integral(Bytes cap) const {
  return period_ > 0 ? curve_.overflow_integral({0, period_}, cap, std::numeric_limits<Bytes>::max())
                     : 0;
}

Micros PeriodicCurve::headroom_start(Micros lower, Micros upper, Bytes extra, Bytes limit) const {
  if (upper <= lower) return upper;
  // Segments in absolute time, then scanned from the right.
  std::vector<std::pair<Window, Bytes>> segs;
  Micros offset = lower - floor_mod(lower, period_);
  for (const auto& piece : periodic_pieces({lower, upper}, period_)) {
    curve_.for_each_segment(piece, [&](Window s, Bytes v) {
      segs.push_back({{s.begin + offset, s.end + offset}, v});
    });
    offset += period_;
  }
  Micros t = upper;
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (it->second + extra > limit) break;
    t = it->first.begin;
  }
  return t;
}

}  // namespace tmig
