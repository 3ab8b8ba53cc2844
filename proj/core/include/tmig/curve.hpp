// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "tmig/types.hpp"

namespace tmig {

/// Piecewise-constant function of time. Value is 0 before the first
/// breakpoint and holds the last breakpoint's value to +infinity.
/// Adjacent breakpoints always carry different values.
class PressureCurve {
 public:
  struct Point {
    Micros time = 0;
    Bytes value = 0;
    friend bool operator==(const Point&, const Point&) = default;
  };

  PressureCurve() = default;
  explicit PressureCurve(std::vector<Point> points);

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] Bytes value_at(Micros t) const;

  /// Adds delta on [w.begin, w.end).
  void add(Window w, Bytes delta);

  [[nodiscard]] Bytes max_over(Window w) const;
  [[nodiscard]] Bytes min_over(Window w) const;
  /// Integral of P over w, in byte-microseconds.
  [[nodiscard]] std::int64_t integral(Window w) const;
  /// Integral of min(clamp, max(0, P - cap)) over w.
  [[nodiscard]] std::int64_t overflow_integral(Window w, Bytes cap, Bytes clamp) const;

  /// Visits every maximal constant piece of P restricted to w, in order.
  template <typename F>
  void for_each_segment(Window w, F&& fn) const;

  friend bool operator==(const PressureCurve&, const PressureCurve&) = default;

 private:
  void normalize();
  std::vector<Point> points_;
};

/// Splits a window of a periodic timeline (period > 0) into pieces that lie
/// in [0, period). Windows longer than the period cover it once per lap.
std::vector<Window> periodic_pieces(Window w, Micros period);

/// True if the two windows intersect modulo period.
bool periodic_overlap(Window a, Window b, Micros period);

/// A curve over one iteration [0, period) whose operations accept windows
/// anywhere in time and fold them into the iteration.
class PeriodicCurve {
 public:
  PeriodicCurve() = default;
  PeriodicCurve(PressureCurve base, Micros period) : curve_(std::move(base)), period_(period) {}

  [[nodiscard]] Micros period() const { return period_; }
  [[nodiscard]] const PressureCurve& curve() const { return curve_; }

  [[nodiscard]] Bytes value_at(Micros t) const;
  void add(Window w, Bytes delta);
  [[nodiscard]] Bytes max_over(Window w) const;
  [[nodiscard]] Bytes min_over(Window w) const;
  [[nodiscard]] Bytes max() const { return max_over({0, period_}); }
  [[nodiscard]] std::int64_t overflow_integral(Window w, Bytes cap, Bytes clamp) const;
  [[nodiscard]] std::int64_t overflow_integral(Bytes cap) const;

  /// Smallest t >= lower such that value + extra <= limit everywhere on
  /// [t, upper). Returns upper when even [upper - 1, upper) fails.
  [[nodiscard]] Micros headroom_start(Micros lower, Micros upper, Bytes extra, Bytes limit) const;

 private:
  PressureCurve curve_;
  Micros period_ = 0;
};

template <typename F>
void PressureCurve::for_each_segment(Window w, F&& fn) const {
  if (w.end <= w.begin) return;
  // Index of the last breakpoint at or before w.begin.
  std::size_t lo = 0;
  std::size_t hi = points_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (points_[mid].time <= w.begin) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  Micros t = w.begin;
  Bytes v = lo == 0 ? 0 : points_[lo - 1].value;
  for (std::size_t i = lo; i < points_.size() && points_[i].time < w.end; ++i) {
    fn(Window{t, points_[i].time}, v);
    t = points_[i].time;
    v = points_[i].value;
  }
  fn(Window{t, w.end}, v);
}

}  // namespace tmig
