// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/eviction.hpp"

#include <algorithm>

namespace tmig {

ChannelKind channel_of(Destination dest) {
  return dest == Destination::Host ? ChannelKind::Host : ChannelKind::Ssd;
}

std::string_view to_string(Destination dest) {
  return dest == Destination::Host ? "host" : "ssd";
}

namespace {
__extension__ using Wide = __int128;
}  // namespace

bool ranks_before(const EvictionCandidate& a, const EvictionCandidate& b) {
  // Exact ratio comparison by cross-multiplication.
  const Wide lhs = static_cast<Wide>(a.benefit) * b.cost_us;
  const Wide rhs = static_cast<Wide>(b.benefit) * a.cost_us;
  if (lhs != rhs) return lhs > rhs;
  if (a.benefit != b.benefit) return a.benefit > b.benefit;
  if (a.period.start_us != b.period.start_us) return a.period.start_us < b.period.start_us;
  return a.period.tensor_id < b.period.tensor_id;
}

SchedulerState::SchedulerState(const WorkloadTrace&, const TraceAnalysis& analysis)
    : period(analysis.timeline.total_us),
      pressure(analysis.pressure, analysis.timeline.total_us),
      reservations(analysis.timeline.total_us),
      host_occupancy(PressureCurve{}, analysis.timeline.total_us),
      remaining(analysis.periods) {}

std::optional<EvictionCandidate> score_candidate(const InactivePeriod& period, Bytes size,
                                                 Destination dest, const SchedulerState& state,
                                                 const DeviceConfig& config) {
  if (dest == Destination::Ssd && state.ssd_occupancy + size > config.ssd_capacity_bytes) {
    return std::nullopt;
  }
  const ChannelKind ch = channel_of(dest);
  const ChannelConfig link = config.channel(ch);
  const Micros te = transfer_time(size, link, Direction::FromDevice);
  const Micros tp = transfer_time(size, link, Direction::ToDevice);

  const auto e0 = state.reservations.earliest_slot(ch, Direction::FromDevice, period.start_us, te);
  if (!e0) return std::nullopt;
  const Micros e1 = *e0 + te;
  const auto p0 = state.reservations.latest_slot(ch, Direction::ToDevice, period.end_us, tp, e1);
  if (!p0) return std::nullopt;

  EvictionCandidate c;
  c.period = period;
  c.size_bytes = size;
  c.destination = dest;
  c.evict = {*e0, e1};
  c.prefetch = {*p0, *p0 + tp};
  if (dest == Destination::Host && c.freed().length() > 0 &&
      state.host_occupancy.max_over(c.freed()) + size > config.host_mem_bytes) {
    return std::nullopt;
  }
  c.benefit = state.pressure.overflow_integral(c.freed(), config.gpu_mem_bytes, size);
  c.cost_us = te + tp;
  return c;
}

DestinationChoice choose_destination(const InactivePeriod& period, Bytes size,
                                     const SchedulerState& state, const DeviceConfig& config,
                                     bool allow_host) {
  using Kind = DestinationChoice::Kind;
  auto ssd = score_candidate(period, size, Destination::Ssd, state, config);
  bool high_pressure = !ssd || ssd->benefit == 0;
  if (!high_pressure && period.length() > 0) {
    const Micros busy =
        std::max(state.reservations.busy_time_within(ChannelKind::Ssd, Direction::FromDevice,
                                                     period.window()),
                 state.reservations.busy_time_within(ChannelKind::Ssd, Direction::ToDevice,
                                                     period.window()));
    high_pressure = static_cast<double>(busy) >
                    config.hp_utilization_threshold * static_cast<double>(period.length());
  }
  if (!high_pressure) return {Kind::Ssd, ssd};

  std::optional<EvictionCandidate> host;
  if (allow_host) host = score_candidate(period, size, Destination::Host, state, config);
  if (host && host->benefit > 0) return {Kind::Host, host};
  if (ssd) return {Kind::Ssd, ssd};
  if (host) return {Kind::Host, host};
  return {Kind::Drop, std::nullopt};
}

const EvictionCandidate& select_best(const std::vector<EvictionCandidate>& candidates) {
  const EvictionCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.benefit <= 0) continue;
    if (best == nullptr || ranks_before(c, *best)) best = &c;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::NoBeneficialCandidate, "no candidate has positive benefit");
  }
  return *best;
}

void apply(SchedulerState& state, const EvictionCandidate& c, const DeviceConfig& config) {
  auto it = std::find(state.remaining.begin(), state.remaining.end(), c.period);
  if (it == state.remaining.end()) {
    throw Error(ErrorCode::CapacityViolation, "period is not pending");
  }
  const Window freed = c.freed();
  if (freed.length() < 0 || c.evict.begin < c.period.start_us || c.prefetch.end > c.period.end_us) {
    throw Error(ErrorCode::CapacityViolation, "transfer windows outside the period");
  }
  if (freed.length() > 0 && state.pressure.min_over(freed) < c.size_bytes) {
    throw Error(ErrorCode::CapacityViolation, "pressure would become negative");
  }
  if (c.destination == Destination::Host) {
    if (freed.length() > 0 &&
        state.host_occupancy.max_over(freed) + c.size_bytes > config.host_mem_bytes) {
      throw Error(ErrorCode::CapacityViolation, "host memory exceeded");
    }
  } else if (state.ssd_occupancy + c.size_bytes > config.ssd_capacity_bytes) {
    throw Error(ErrorCode::CapacityViolation, "SSD capacity exceeded");
  }
  const ChannelKind ch = channel_of(c.destination);
  const auto owner = static_cast<std::int64_t>(state.accepted.size());
  if (!state.reservations.is_free(ch, Direction::FromDevice, c.evict) ||
      !state.reservations.is_free(ch, Direction::ToDevice, c.prefetch)) {
    throw Error(ErrorCode::CapacityViolation, "transfer window already reserved");
  }

  state.reservations.reserve(ch, Direction::FromDevice, c.evict, owner);
  state.reservations.reserve(ch, Direction::ToDevice, c.prefetch, owner);
  state.pressure.add(freed, -c.size_bytes);
  if (c.destination == Destination::Host) {
    state.host_occupancy.add(freed, c.size_bytes);
  } else {
    state.ssd_occupancy += c.size_bytes;
  }
  state.remaining.erase(it);
  state.accepted.push_back(c);
}

ScheduleResult schedule_evictions(const WorkloadTrace& trace, const TraceAnalysis& analysis,
                                  const DeviceConfig& config, const PlannerOptions& options) {
  ScheduleResult out;
  out.state = SchedulerState(trace, analysis);
  auto& state = out.state;
  auto& plan = out.plan;
  plan.iteration_us = state.period;
  if (state.period <= 0) return out;

  std::erase_if(state.remaining,
                [&](const InactivePeriod& p) { return p.length() <= options.min_period_us; });

  const Bytes cap = config.gpu_mem_bytes;
  // Cached choices, parallel to state.remaining.
  std::vector<std::optional<DestinationChoice>> cache(state.remaining.size());

  while (!state.remaining.empty() && state.pressure.max() > cap) {
    std::vector<EvictionCandidate> candidates;
    for (std::size_t i = 0; i < state.remaining.size();) {
      const auto& p = state.remaining[i];
      if (!cache[i]) {
        cache[i] = choose_destination(p, trace.tensor(p.tensor_id).size_bytes, state, config,
                                      options.allow_host);
      }
      if (cache[i]->kind == DestinationChoice::Kind::Drop) {
        plan.unschedulable.push_back(p);
        state.remaining.erase(state.remaining.begin() + static_cast<std::ptrdiff_t>(i));
        cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      if (cache[i]->candidate->benefit > 0) candidates.push_back(*cache[i]->candidate);
      ++i;
    }
    if (candidates.empty()) break;

    const EvictionCandidate best = select_best(candidates);
    const auto pos = static_cast<std::ptrdiff_t>(
        std::find(state.remaining.begin(), state.remaining.end(), best.period) -
        state.remaining.begin());
    apply(state, best, config);
    cache.erase(cache.begin() + pos);

    const Bytes ssd_headroom = config.ssd_capacity_bytes - state.ssd_occupancy;
    for (std::size_t i = 0; i < state.remaining.size(); ++i) {
      const auto& p = state.remaining[i];
      if (options.full_rescore || periodic_overlap(p.window(), best.period.window(), state.period) ||
          trace.tensor(p.tensor_id).size_bytes > ssd_headroom) {
        cache[i].reset();
      }
    }
  }

  for (const auto& c : state.accepted) {
    plan.evictions.push_back({c, c.prefetch.begin, c.prefetch.begin});
  }
  plan.residual_overflow = state.pressure.overflow_integral(cap);
  return out;
}

}  // namespace tmig
