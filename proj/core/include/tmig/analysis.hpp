// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tmig/curve.hpp"
#include "tmig/trace.hpp"

namespace tmig {

/// Serial replay of one iteration: kernel k runs on [start_us[k], end_us[k]).
struct Timeline {
  std::vector<Micros> start_us;
  std::vector<Micros> end_us;
  Micros total_us = 0;

  [[nodiscard]] Window kernel(std::size_t k) const { return {start_us[k], end_us[k]}; }
  /// Index of the kernel running at t, or n when t >= total_us.
  [[nodiscard]] std::size_t kernel_at(Micros t) const;
};

Timeline build_timeline(const WorkloadTrace& trace);

/// Resolves every tensor to Global or Intermediate. Explicit labels win;
/// an unlabeled tensor is Global iff some kernel reads it before any kernel
/// writes it.
std::map<TensorId, TensorKind> classify_tensors(const WorkloadTrace& trace);

struct TensorLifetime {
  TensorId tensor_id = 0;
  int birth_kernel = 0;
  int death_kernel = 0;
  bool is_global = false;
  friend bool operator==(const TensorLifetime&, const TensorLifetime&) = default;
};

/// One entry per tensor referenced by at least one kernel, ordered by id.
std::vector<TensorLifetime> compute_lifetimes(const WorkloadTrace& trace);

struct InactivePeriod {
  TensorId tensor_id = 0;
  Micros start_us = 0;
  Micros end_us = 0;  // exceeds the iteration length for wrapping periods
  bool wraps_iteration = false;

  [[nodiscard]] Micros length() const { return end_us - start_us; }
  [[nodiscard]] Window window() const { return {start_us, end_us}; }
  friend bool operator==(const InactivePeriod&, const InactivePeriod&) = default;
};

/// Gaps between consecutive uses, plus the wrap-around gap for Global
/// tensors. Periods with length <= min_period_us are dropped. Ordered by
/// (tensor id, start).
std::vector<InactivePeriod> compute_inactive_periods(const WorkloadTrace& trace,
                                                     const Timeline& timeline,
                                                     Micros min_period_us = 0);

/// Bytes live at each instant of one iteration, no evictions applied.
PressureCurve initial_pressure_curve(const WorkloadTrace& trace,
                                     const std::vector<TensorLifetime>& lifetimes,
                                     const Timeline& timeline);

struct TraceAnalysis {
  Timeline timeline;
  std::map<TensorId, TensorKind> kinds;
  std::vector<TensorLifetime> lifetimes;
  std::vector<InactivePeriod> periods;
  PressureCurve pressure;
};

TraceAnalysis analyze_trace(const WorkloadTrace& trace, Micros min_period_us = 0);

struct KernelMemoryRow {
  int kernel_index = 0;
  std::string name;
  Bytes active_bytes = 0;
  Bytes total_bytes = 0;
};

struct PeriodCdfRow {
  Micros length_us = 0;
  double cum_fraction = 0.0;
};

struct PeriodScatterRow {
  TensorId tensor_id = 0;
  Bytes size_bytes = 0;
  Micros length_us = 0;
};

struct CharacterizationReport {
  std::vector<KernelMemoryRow> active_vs_total;
  std::vector<PeriodCdfRow> period_cdf;
  std::vector<PeriodScatterRow> period_scatter;

  [[nodiscard]] std::string active_vs_total_csv() const;
  [[nodiscard]] std::string period_cdf_csv() const;
  [[nodiscard]] std::string period_scatter_csv() const;
};

/// total_bytes is the peak of the pressure curve while the kernel runs.
CharacterizationReport characterize(const WorkloadTrace& trace, const Timeline& timeline);

}  // namespace tmig
