// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "tmig/format.hpp"

namespace tmig {

std::size_t Timeline::kernel_at(Micros t) const {
  auto it = std::upper_bound(start_us.begin(), start_us.end(), t);
  if (t >= total_us) return start_us.size();
  return static_cast<std::size_t>(it - start_us.begin()) - 1;
}

Timeline build_timeline(const WorkloadTrace& trace) {
  Timeline tl;
  Micros t = 0;
  for (const auto& k : trace.kernels()) {
    tl.start_us.push_back(t);
    t += k.duration_us;
    tl.end_us.push_back(t);
  }
  tl.total_us = t;
  return tl;
}

namespace {

/// Sorted kernel indices that reference each tensor, aligned with tensors().
std::vector<std::vector<int>> uses_by_tensor(const WorkloadTrace& trace) {
  std::vector<std::vector<int>> uses(trace.tensors().size());
  for (const auto& k : trace.kernels()) {
    std::vector<TensorId> ids = k.inputs;
    ids.insert(ids.end(), k.outputs.begin(), k.outputs.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (TensorId id : ids) uses[trace.tensor_slot(id)].push_back(k.index);
  }
  return uses;
}

}  // namespace

std::map<TensorId, TensorKind> classify_tensors(const WorkloadTrace& trace) {
  std::map<TensorId, TensorKind> out;
  std::map<TensorId, bool> seen;  // value: first touch was a pure read
  for (const auto& k : trace.kernels()) {
    for (TensorId id : k.inputs) {
      if (!seen.count(id)) {
        seen[id] = !std::binary_search(k.outputs.begin(), k.outputs.end(), id);
      }
    }
    for (TensorId id : k.outputs) {
      if (!seen.count(id)) seen[id] = false;
    }
  }
  for (const auto& t : trace.tensors()) {
    if (t.kind != TensorKind::Unspecified) {
      out[t.id] = t.kind;
    } else {
      auto it = seen.find(t.id);
      out[t.id] = (it != seen.end() && it->second) ? TensorKind::Global : TensorKind::Intermediate;
    }
  }
  return out;
}

std::vector<TensorLifetime> compute_lifetimes(const WorkloadTrace& trace) {
  const auto kinds = classify_tensors(trace);
  const auto uses = uses_by_tensor(trace);
  std::vector<TensorLifetime> out;
  for (std::size_t i = 0; i < trace.tensors().size(); ++i) {
    if (uses[i].empty()) continue;
    const TensorId id = trace.tensors()[i].id;
    out.push_back({id, uses[i].front(), uses[i].back(), kinds.at(id) == TensorKind::Global});
  }
  return out;
}

std::vector<InactivePeriod> compute_inactive_periods(const WorkloadTrace& trace,
                                                     const Timeline& timeline,
                                                     Micros min_period_us) {
  const auto kinds = classify_tensors(trace);
  const auto uses = uses_by_tensor(trace);
  std::vector<InactivePeriod> out;
  const auto keep = [&](const InactivePeriod& p) {
    if (p.length() > 0 && p.length() > min_period_us) out.push_back(p);
  };
  for (std::size_t i = 0; i < trace.tensors().size(); ++i) {
    const auto& u = uses[i];
    if (u.empty()) continue;
    const TensorId id = trace.tensors()[i].id;
    for (std::size_t j = 1; j < u.size(); ++j) {
      const auto prev = static_cast<std::size_t>(u[j - 1]);
      const auto next = static_cast<std::size_t>(u[j]);
      keep({id, timeline.end_us[prev], timeline.start_us[next], false});
    }
    if (kinds.at(id) == TensorKind::Global) {
      const auto last = static_cast<std::size_t>(u.back());
      const auto first = static_cast<std::size_t>(u.front());
      keep({id, timeline.end_us[last], timeline.total_us + timeline.start_us[first], true});
    }
  }
  return out;
}

PressureCurve initial_pressure_curve(const WorkloadTrace& trace,
                                     const std::vector<TensorLifetime>& lifetimes,
                                     const Timeline& timeline) {
  // Sweep over (time, delta) events.
  std::map<Micros, Bytes> delta;
  for (const auto& lt : lifetimes) {
    const Bytes size = trace.tensor(lt.tensor_id).size_bytes;
    Window live = lt.is_global
                      ? Window{0, timeline.total_us}
                      : Window{timeline.start_us[static_cast<std::size_t>(lt.birth_kernel)],
                               timeline.end_us[static_cast<std::size_t>(lt.death_kernel)]};
    delta[live.begin] += size;
    delta[live.end] -= size;
  }
  std::vector<PressureCurve::Point> pts;
  Bytes level = 0;
  for (const auto& [t, d] : delta) {
    level += d;
    pts.push_back({t, level});
  }
  return PressureCurve(std::move(pts));
}

TraceAnalysis analyze_trace(const WorkloadTrace& trace, Micros min_period_us) {
  TraceAnalysis a;
  a.timeline = build_timeline(trace);
  a.kinds = classify_tensors(trace);
  a.lifetimes = compute_lifetimes(trace);
  a.periods = compute_inactive_periods(trace, a.timeline, min_period_us);
  a.pressure = initial_pressure_curve(trace, a.lifetimes, a.timeline);
  return a;
}

CharacterizationReport characterize(const WorkloadTrace& trace, const Timeline& timeline) {
  CharacterizationReport r;
  const auto lifetimes = compute_lifetimes(trace);
  const auto pressure = initial_pressure_curve(trace, lifetimes, timeline);
  for (const auto& k : trace.kernels()) {
    std::vector<TensorId> ids = k.inputs;
    ids.insert(ids.end(), k.outputs.begin(), k.outputs.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Bytes active = 0;
    for (TensorId id : ids) active += trace.tensor(id).size_bytes;
    const auto idx = static_cast<std::size_t>(k.index);
    r.active_vs_total.push_back(
        {k.index, k.name, active, pressure.max_over(timeline.kernel(idx))});
  }

  auto periods = compute_inactive_periods(trace, timeline);
  for (const auto& p : periods) {
    r.period_scatter.push_back({p.tensor_id, trace.tensor(p.tensor_id).size_bytes, p.length()});
  }
  std::vector<Micros> lengths;
  for (const auto& p : periods) lengths.push_back(p.length());
  std::sort(lengths.begin(), lengths.end());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    r.period_cdf.push_back(
        {lengths[i], static_cast<double>(i + 1) / static_cast<double>(lengths.size())});
  }
  return r;
}

std::string CharacterizationReport::active_vs_total_csv() const {
  std::ostringstream out;
  out << "kernel_index,name,active_bytes,total_bytes\n";
  for (const auto& row : active_vs_total) {
    out << row.kernel_index << ',' << row.name << ',' << row.active_bytes << ','
        << row.total_bytes << '\n';
  }
  return out.str();
}

std::string CharacterizationReport::period_cdf_csv() const {
  std::ostringstream out;
  out << "length_us,cum_fraction\n";
  for (const auto& row : period_cdf) {
    out << row.length_us << ',' << format_fixed(row.cum_fraction, 6) << '\n';
  }
  return out.str();
}

std::string CharacterizationReport::period_scatter_csv() const {
  std::ostringstream out;
  out << "tensor_id,size_bytes,length_us\n";
  for (const auto& row : period_scatter) {
    out << row.tensor_id << ',' << row.size_bytes << ',' << row.length_us << '\n';
  }
  return out.str();
}

}  // namespace tmig
