// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/memsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>

#include "tmig/analysis.hpp"

namespace tmig {

namespace {

enum class Loc { Unallocated, Gpu, Host, Ssd };

// Same-time events run in this order.
enum class EventClass { TransferDone = 0, KernelEnd = 1, Instruction = 2 };

struct Event {
  Micros time = 0;
  EventClass cls = EventClass::Instruction;
  std::uint64_t seq = 0;
  std::int64_t a = 0;  // transfer id, kernel index, or instruction group index
  std::int64_t b = 0;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (cls != o.cls) return cls > o.cls;
    return seq > o.seq;
  }
};

enum class XferState { Queued, InFlight, Done, Canceled };

struct Transfer {
  std::size_t tensor = 0;
  ChannelKind channel = ChannelKind::Host;
  Direction dir = Direction::ToDevice;
  bool priority = false;
  bool fault = false;
  Micros duration = 0;
  XferState state = XferState::Queued;
  Micros enqueue_us = 0;
  Micros start_us = 0;
};

struct TensorState {
  TensorId id = 0;
  Bytes size = 0;
  Loc loc = Loc::Unallocated;
  int pins = 0;
  std::int64_t recency = 0;
  std::optional<std::size_t> transfer;
  bool refetch = false;
  bool pending_alloc = false;
  bool dead = false;  // freed while a transfer was in flight
};

struct Lane {
  std::deque<std::size_t> priority;
  std::deque<std::size_t> normal;
  std::optional<std::size_t> in_flight;
};

/// Instruction with its offset from the start of its reference kernel.
struct TimedInstruction {
  Micros delta = 0;
  MigrationInstruction ins;
};

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

Bytes round_pages(Bytes b, Bytes page) { return (b + page - 1) / page * page; }

class Simulator {
 public:
  Simulator(const Program& program, const WorkloadTrace& trace, const DeviceConfig& config,
            const SimOptions& options)
      : program_(program), trace_(trace), cfg_(config), opt_(options) {}

  SimResult run();

 private:
  void check_program();
  void build_groups();
  void place_initial();

  void push(Micros t, EventClass cls, std::int64_t a, std::int64_t b = 0);
  void schedule_group(std::size_t group, int iteration, Micros base);
  void log(std::uint64_t tag, std::int64_t x);

  void on_instruction(const MigrationInstruction& ins);
  void on_transfer_done(std::size_t xid);
  void on_kernel_end();

  void pump();
  bool try_start_lane(std::size_t lane);
  bool try_pending_allocs();
  bool try_start_kernel();
  bool try_alloc(std::size_t slot, bool urgent);
  /// Queues LRU evictions until `need` bytes are free or on their way out.
  bool make_room(Bytes need, bool urgent);

  std::size_t enqueue(std::size_t slot, ChannelKind ch, Direction dir, bool priority, bool fault);
  void cancel(std::size_t xid);
  void prefetch(std::size_t slot);

  static std::size_t lane_index(ChannelKind ch, Direction dir) {
    return static_cast<std::size_t>(ch) * 2 + static_cast<std::size_t>(dir);
  }
  [[nodiscard]] Bytes gpu_free() const { return cfg_.gpu_mem_bytes - gpu_used_; }
  void bump(TensorState& t) { t.recency = ++clock_; }
  [[nodiscard]] bool protected_slot(std::size_t slot) const;

  const Program& program_;
  const WorkloadTrace& trace_;
  const DeviceConfig& cfg_;
  SimOptions opt_;

  std::size_t n_ = 0;
  std::vector<TensorState> tensors_;
  std::vector<std::vector<std::size_t>> kernel_slots_;  // tensors each kernel touches
  std::vector<std::vector<TimedInstruction>> groups_;   // per reference kernel 0..n
  std::vector<Transfer> transfers_;
  std::array<Lane, 4> lanes_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<MigrationInstruction> fired_;  // instruction payloads by event

  Bytes gpu_used_ = 0;
  Bytes host_used_ = 0;
  Bytes outbound_pending_ = 0;
  std::int64_t clock_ = 0;
  std::uint64_t seq_ = 0;
  Micros now_ = 0;

  // Kernel progress.
  int iteration_ = 0;
  std::size_t next_kernel_ = 0;
  bool running_ = false;
  bool finished_ = false;
  Micros launch_us_ = 0;
  bool kernel_faulted_ = false;

  SimResult res_;
};

void Simulator::log(std::uint64_t tag, std::int64_t x) {
  for (std::uint64_t v : {static_cast<std::uint64_t>(now_), tag, static_cast<std::uint64_t>(x)}) {
    for (int i = 0; i < 8; ++i) {
      res_.event_log_hash ^= (v >> (8 * i)) & 0xffU;
      res_.event_log_hash *= kFnvPrime;
    }
  }
}

void Simulator::check_program() {
  if (program_.kernels.size() != trace_.num_kernels()) {
    throw Error(ErrorCode::ProgramInconsistent, "program and trace kernel counts differ");
  }
  std::map<TensorId, int> evicts;
  for (const auto& slot : program_.slots) {
    for (const auto& ins : slot) {
      if (!trace_.has_tensor(ins.tensor_id) ||
          trace_.tensor(ins.tensor_id).size_bytes != ins.size_bytes) {
        throw Error(ErrorCode::ProgramInconsistent,
                    "instruction references unknown tensor " + std::to_string(ins.tensor_id));
      }
      if (ins.op == OpKind::PreEvict) {
        if (ins.target != Target::Ssd && ins.target != Target::Host) {
          throw Error(ErrorCode::ProgramInconsistent, "pre_evict without a valid target");
        }
        ++evicts[ins.tensor_id];
      }
    }
  }
  for (const auto& slot : program_.slots) {
    for (const auto& ins : slot) {
      if (ins.op == OpKind::Prefetch && evicts[ins.tensor_id] == 0) {
        throw Error(ErrorCode::ProgramInconsistent,
                    "prefetch of tensor " + std::to_string(ins.tensor_id) + " that is never evicted");
      }
    }
  }
}

void Simulator::build_groups() {
  std::vector<Micros> start(n_ + 1, 0);
  for (std::size_t k = 0; k < n_; ++k) start[k + 1] = start[k] + program_.kernels[k].duration_us;
  groups_.assign(n_ + 1, {});
  for (const auto& slot : program_.slots) {
    for (const auto& ins : slot) {
      // Reference kernel: the one planned to run at the issue time.
      auto it = std::upper_bound(start.begin(), start.end() - 1, ins.issue_time_us);
      std::size_t j = static_cast<std::size_t>(it - start.begin());
      j = j == 0 ? 0 : j - 1;
      if (ins.issue_time_us >= start[n_]) j = n_;
      groups_[j].push_back({ins.issue_time_us - start[j], ins});
    }
  }
  for (auto& g : groups_) {
    std::stable_sort(g.begin(), g.end(), [](const TimedInstruction& a, const TimedInstruction& b) {
      if (a.delta != b.delta) return a.delta < b.delta;
      if (a.ins.op != b.ins.op) return a.ins.op < b.ins.op;
      return a.ins.tensor_id < b.ins.tensor_id;
    });
  }
}

void Simulator::place_initial() {
  // Tensors allocated once and never freed persist across iterations.
  std::map<TensorId, bool> freed;
  std::map<TensorId, std::vector<MigrationInstruction>> ops;
  for (const auto& slot : program_.slots) {
    for (const auto& ins : slot) {
      if (ins.op == OpKind::Free) freed[ins.tensor_id] = true;
      if (ins.op == OpKind::PreEvict || ins.op == OpKind::Prefetch) ops[ins.tensor_id].push_back(ins);
    }
  }
  const auto kinds = classify_tensors(trace_);
  std::vector<std::pair<int, std::size_t>> persistent;  // (first use, slot)
  std::vector<int> first_use(tensors_.size(), std::numeric_limits<int>::max());
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t s : kernel_slots_[k]) first_use[s] = std::min(first_use[s], static_cast<int>(k));
  }
  for (std::size_t s = 0; s < tensors_.size(); ++s) {
    const TensorId id = tensors_[s].id;
    if (first_use[s] == std::numeric_limits<int>::max()) continue;
    if (freed.count(id) || kinds.at(id) != TensorKind::Global) continue;
    persistent.push_back({first_use[s], s});
  }
  std::sort(persistent.begin(), persistent.end());

  for (const auto& [first, s] : persistent) {
    auto& t = tensors_[s];
    auto it = ops.find(t.id);
    std::optional<Target> offload;
    if (it != ops.end()) {
      auto list = it->second;
      std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
        if (a.issue_time_us != b.issue_time_us) return a.issue_time_us < b.issue_time_us;
        return a.op < b.op;
      });
      const auto& head = list.front();
      if (head.op == OpKind::Prefetch) {
        for (const auto& ins : list) {
          if (ins.op == OpKind::PreEvict) offload = ins.target;
        }
      } else if (head.issue_time_us == 0) {
        offload = head.target;
      }
    }
    if (!offload && t.size <= gpu_free()) {
      t.loc = Loc::Gpu;
      gpu_used_ += t.size;
      res_.initial_load_bytes += t.size;
    } else {
      const bool host_ok = (offload ? *offload == Target::Host : opt_.allow_host) &&
                           host_used_ + t.size <= cfg_.host_mem_bytes;
      t.loc = host_ok ? Loc::Host : Loc::Ssd;
      if (host_ok) host_used_ += t.size;
    }
    bump(t);
  }
  res_.peak_gpu_bytes = gpu_used_;
}

void Simulator::push(Micros t, EventClass cls, std::int64_t a, std::int64_t b) {
  events_.push(Event{t, cls, seq_++, a, b});
}

void Simulator::schedule_group(std::size_t group, int /*iteration*/, Micros base) {
  for (const auto& ti : groups_[group]) {
    fired_.push_back(ti.ins);
    push(base + ti.delta, EventClass::Instruction, static_cast<std::int64_t>(fired_.size() - 1));
  }
}

std::size_t Simulator::enqueue(std::size_t slot, ChannelKind ch, Direction dir, bool priority,
                               bool fault) {
  auto& t = tensors_[slot];
  Transfer x;
  x.tensor = slot;
  x.channel = ch;
  x.dir = dir;
  x.priority = priority;
  x.fault = fault;
  x.duration = fault ? fault_service_time(t.size, ch, cfg_)
                     : transfer_time(t.size, cfg_.channel(ch), dir);
  x.enqueue_us = now_;
  transfers_.push_back(x);
  const std::size_t xid = transfers_.size() - 1;
  auto& lane = lanes_[lane_index(ch, dir)];
  (priority ? lane.priority : lane.normal).push_back(xid);
  t.transfer = xid;
  if (dir == Direction::FromDevice) {
    outbound_pending_ += t.size;
    if (ch == ChannelKind::Host) host_used_ += t.size;
  }
  log(10 + static_cast<std::uint64_t>(lane_index(ch, dir)), t.id);
  return xid;
}

void Simulator::cancel(std::size_t xid) {
  auto& x = transfers_[xid];
  if (x.state != XferState::Queued) return;
  x.state = XferState::Canceled;
  auto& lane = lanes_[lane_index(x.channel, x.dir)];
  for (auto* q : {&lane.priority, &lane.normal}) {
    q->erase(std::remove(q->begin(), q->end(), xid), q->end());
  }
  auto& t = tensors_[x.tensor];
  if (x.dir == Direction::FromDevice) {
    outbound_pending_ -= t.size;
    if (x.channel == ChannelKind::Host) host_used_ -= t.size;
  }
  if (t.transfer == xid) t.transfer.reset();
  log(20, t.id);
}

void Simulator::prefetch(std::size_t slot) {
  auto& t = tensors_[slot];
  if (t.transfer) {
    auto& x = transfers_[*t.transfer];
    if (x.dir == Direction::FromDevice) {
      if (x.state == XferState::Queued) {
        cancel(*t.transfer);
      } else {
        t.refetch = true;
      }
    }
    return;
  }
  if (t.loc == Loc::Host || t.loc == Loc::Ssd) {
    enqueue(slot, t.loc == Loc::Host ? ChannelKind::Host : ChannelKind::Ssd, Direction::ToDevice,
            false, false);
  }
}

void Simulator::on_instruction(const MigrationInstruction& ins) {
  const std::size_t slot = trace_.tensor_slot(ins.tensor_id);
  auto& t = tensors_[slot];
  log(30 + static_cast<std::uint64_t>(ins.op), ins.tensor_id);
  switch (ins.op) {
    case OpKind::Alloc:
      if (t.loc == Loc::Unallocated && !t.transfer) try_alloc(slot, false);
      break;
    case OpKind::Free: {
      t.pending_alloc = false;
      t.refetch = false;
      if (t.transfer) {
        auto& x = transfers_[*t.transfer];
        if (x.state == XferState::Queued) {
          cancel(*t.transfer);
        } else {
          t.dead = true;
          break;
        }
      }
      if (t.loc == Loc::Gpu) gpu_used_ -= t.size;
      if (t.loc == Loc::Host) host_used_ -= t.size;
      t.loc = Loc::Unallocated;
      break;
    }
    case OpKind::PreEvict: {
      if (t.loc != Loc::Gpu || t.pins > 0 || t.transfer) break;
      ChannelKind ch = ins.target == Target::Host ? ChannelKind::Host : ChannelKind::Ssd;
      if (ch == ChannelKind::Host && host_used_ + t.size > cfg_.host_mem_bytes) {
        ch = ChannelKind::Ssd;
      }
      enqueue(slot, ch, Direction::FromDevice, false, false);
      break;
    }
    case OpKind::Prefetch:
      prefetch(slot);
      break;
  }
}

void Simulator::on_transfer_done(std::size_t xid) {
  auto& x = transfers_[xid];
  auto& t = tensors_[x.tensor];
  auto& lane = lanes_[lane_index(x.channel, x.dir)];
  lane.in_flight.reset();
  x.state = XferState::Done;
  t.transfer.reset();
  log(40, t.id);

  const Bytes moved = round_pages(t.size, cfg_.page_size_bytes);
  if (x.dir == Direction::ToDevice) {
    if (x.channel == ChannelKind::Host) {
      res_.traffic.host_in += moved;
      res_.raw_host_in += t.size;
      host_used_ -= t.size;
    } else {
      res_.traffic.ssd_read += moved;
      res_.raw_ssd_read += t.size;
    }
    res_.raw_to_gpu += t.size;
    t.loc = Loc::Gpu;
    bump(t);
  } else {
    if (x.channel == ChannelKind::Host) {
      res_.traffic.host_out += moved;
      res_.raw_host_out += t.size;
    } else {
      res_.traffic.ssd_write += moved;
      res_.raw_ssd_write += t.size;
    }
    res_.raw_from_gpu += t.size;
    outbound_pending_ -= t.size;
    gpu_used_ -= t.size;
    t.loc = x.channel == ChannelKind::Host ? Loc::Host : Loc::Ssd;
    if (t.refetch && !t.dead) {
      t.refetch = false;
      enqueue(x.tensor, x.channel, Direction::ToDevice, false, false);
    }
  }
  res_.transfers.push_back({t.id, x.channel, x.dir, x.priority, x.fault, x.enqueue_us, x.start_us,
                            now_, t.size});
  if (t.dead) {
    // Freed while moving: the bytes moved, then the tensor is gone.
    if (t.loc == Loc::Gpu) gpu_used_ -= t.size;
    if (t.loc == Loc::Host) host_used_ -= t.size;
    t.loc = Loc::Unallocated;
    t.dead = false;
    t.refetch = false;
  }
}

void Simulator::on_kernel_end() {
  const std::size_t k = next_kernel_;
  for (std::size_t s : kernel_slots_[k]) {
    --tensors_[s].pins;
    bump(tensors_[s]);
  }
  auto& run = res_.kernels.back();
  run.end_us = now_;
  running_ = false;
  log(50, static_cast<std::int64_t>(k));

  launch_us_ = now_;
  if (k + 1 < n_) {
    next_kernel_ = k + 1;
    schedule_group(k + 1, iteration_, now_);
    return;
  }
  schedule_group(n_, iteration_, now_);
  if (iteration_ + 1 >= cfg_.num_iterations) {
    finished_ = true;
    return;
  }
  ++iteration_;
  next_kernel_ = 0;
  schedule_group(0, iteration_, now_);
}

bool Simulator::protected_slot(std::size_t slot) const {
  if (finished_ || n_ == 0) return false;
  // The kernel waiting to start, or the one after the running kernel.
  const std::size_t k = running_ ? (next_kernel_ + 1) % n_ : next_kernel_;
  const auto& set = kernel_slots_[k];
  return std::binary_search(set.begin(), set.end(), slot);
}

bool Simulator::make_room(Bytes need, bool urgent) {
  Bytes projected = gpu_free() + outbound_pending_;
  bool changed = false;
  while (projected < need) {
    std::optional<std::size_t> victim;
    for (std::size_t s = 0; s < tensors_.size(); ++s) {
      const auto& t = tensors_[s];
      if (t.loc != Loc::Gpu || t.transfer || t.pins > 0 || protected_slot(s)) continue;
      if (!victim || t.recency < tensors_[*victim].recency) victim = s;
    }
    if (!victim) break;
    const auto& v = tensors_[*victim];
    const bool to_host = opt_.allow_host && host_used_ + v.size <= cfg_.host_mem_bytes;
    enqueue(*victim, to_host ? ChannelKind::Host : ChannelKind::Ssd, Direction::FromDevice, urgent,
            false);
    projected += v.size;
    changed = true;
  }
  return changed;
}

bool Simulator::try_alloc(std::size_t slot, bool urgent) {
  auto& t = tensors_[slot];
  if (t.size <= gpu_free()) {
    t.loc = Loc::Gpu;
    t.pending_alloc = false;
    gpu_used_ += t.size;
    res_.initial_load_bytes += t.size;
    res_.peak_gpu_bytes = std::max(res_.peak_gpu_bytes, gpu_used_);
    bump(t);
    log(60, t.id);
    return true;
  }
  const bool first = !t.pending_alloc;
  t.pending_alloc = true;
  return make_room(t.size, urgent) || first;
}

bool Simulator::try_pending_allocs() {
  bool changed = false;
  for (std::size_t s = 0; s < tensors_.size(); ++s) {
    auto& t = tensors_[s];
    if (!t.pending_alloc) continue;
    if (t.loc != Loc::Unallocated || t.transfer) {
      t.pending_alloc = false;
      continue;
    }
    if (t.size <= gpu_free()) changed |= try_alloc(s, protected_slot(s));
  }
  return changed;
}

bool Simulator::try_start_lane(std::size_t li) {
  auto& lane = lanes_[li];
  if (lane.in_flight) return false;
  std::deque<std::size_t>* q = !lane.priority.empty() ? &lane.priority
                               : !lane.normal.empty() ? &lane.normal
                                                      : nullptr;
  if (q == nullptr) return false;
  const std::size_t xid = q->front();
  auto& x = transfers_[xid];
  auto& t = tensors_[x.tensor];
  if (x.dir == Direction::ToDevice) {
    if (t.size > gpu_free()) {
      // Planned fetches wait for room; if the next kernel needs the tensor
      // first, try_start_kernel turns the fetch into a demand fault.
      if (x.priority) return make_room(t.size, true);
      return false;
    }
    gpu_used_ += t.size;
    res_.peak_gpu_bytes = std::max(res_.peak_gpu_bytes, gpu_used_);
  }
  q->pop_front();
  x.state = XferState::InFlight;
  x.start_us = now_;
  lane.in_flight = xid;
  push(now_ + x.duration, EventClass::TransferDone, static_cast<std::int64_t>(xid));
  log(70 + li, t.id);
  return true;
}

bool Simulator::try_start_kernel() {
  if (running_ || finished_) return false;
  const std::size_t k = next_kernel_;
  bool ready = true;
  bool changed = false;
  for (std::size_t s : kernel_slots_[k]) {
    auto& t = tensors_[s];
    if (t.transfer) {
      const auto& x = transfers_[*t.transfer];
      if (x.dir == Direction::FromDevice) {
        if (x.state != XferState::Queued) {
          t.refetch = true;
          ready = false;
          continue;
        }
        cancel(*t.transfer);
        changed = true;
      } else if (x.state == XferState::InFlight || x.priority) {
        ready = false;
        continue;
      } else {
        // A planned fetch still waiting in its queue: demand it now.
        cancel(*t.transfer);
        changed = true;
      }
    }
    if (t.loc == Loc::Gpu) continue;
    ready = false;
    if (t.loc == Loc::Unallocated) {
      changed |= try_alloc(s, true);
      continue;
    }
    const ChannelKind ch = t.loc == Loc::Host ? ChannelKind::Host : ChannelKind::Ssd;
    enqueue(s, ch, Direction::ToDevice, true, true);
    ++res_.fault_count;
    kernel_faulted_ = true;
    if (opt_.hooks != nullptr) opt_.hooks->on_fault(iteration_, static_cast<int>(k), t.id);
    changed = true;
  }
  if (!ready) return changed;

  // Every tensor is resident.
  for (std::size_t s : kernel_slots_[k]) {
    ++tensors_[s].pins;
    bump(tensors_[s]);
  }
  running_ = true;
  const Micros dur = trace_.kernels()[k].duration_us;
  KernelRun run;
  run.index = static_cast<int>(k);
  run.iteration = iteration_;
  run.launch_us = launch_us_;
  run.start_us = now_;
  run.stall_us = now_ - launch_us_;
  run.slowdown = static_cast<double>(dur + run.stall_us) / static_cast<double>(dur);
  res_.kernels.push_back(run);
  res_.stall_us += run.stall_us;
  if (kernel_faulted_) res_.fault_stall_us += run.stall_us;
  kernel_faulted_ = false;
  push(now_ + dur, EventClass::KernelEnd, static_cast<std::int64_t>(k));
  log(80, static_cast<std::int64_t>(k));

  if (opt_.hooks != nullptr) {
    for (TensorId id : opt_.hooks->prefetch_at_start(iteration_, static_cast<int>(k))) {
      if (trace_.has_tensor(id)) prefetch(trace_.tensor_slot(id));
    }
  }
  return true;
}

void Simulator::pump() {
  for (int guard = 0; guard < 1'000'000; ++guard) {
    bool changed = false;
    for (std::size_t li = 0; li < lanes_.size(); ++li) changed |= try_start_lane(li);
    changed |= try_pending_allocs();
    changed |= try_start_kernel();
    if (!changed) return;
  }
  throw Error(ErrorCode::ProgramInconsistent, "simulation failed to settle");
}

SimResult Simulator::run() {
  cfg_.validate();
  check_program();
  n_ = trace_.num_kernels();
  tensors_.resize(trace_.tensors().size());
  for (std::size_t s = 0; s < tensors_.size(); ++s) {
    tensors_[s].id = trace_.tensors()[s].id;
    tensors_[s].size = trace_.tensors()[s].size_bytes;
  }
  kernel_slots_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const auto& kr = trace_.kernels()[k];
    Bytes ws = 0;
    for (const auto* ids : {&kr.inputs, &kr.outputs}) {
      for (TensorId id : *ids) kernel_slots_[k].push_back(trace_.tensor_slot(id));
    }
    auto& v = kernel_slots_[k];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t s : v) ws += tensors_[s].size;
    if (ws > cfg_.gpu_mem_bytes) {
      throw Error(ErrorCode::CapacityViolation,
                  "kernel " + std::to_string(k) + " needs more memory than the GPU has");
    }
  }
  res_.event_log_hash = kFnvOffset;
  res_.ideal_us = trace_.total_duration() * cfg_.num_iterations;
  if (n_ == 0) return res_;

  build_groups();
  place_initial();
  schedule_group(0, 0, 0);
  pump();

  while (!finished_ && !events_.empty()) {
    now_ = events_.top().time;
    while (!events_.empty() && events_.top().time == now_ && !finished_) {
      const Event ev = events_.top();
      events_.pop();
      switch (ev.cls) {
        case EventClass::TransferDone:
          on_transfer_done(static_cast<std::size_t>(ev.a));
          break;
        case EventClass::KernelEnd:
          on_kernel_end();
          break;
        case EventClass::Instruction:
          on_instruction(fired_[static_cast<std::size_t>(ev.a)]);
          break;
      }
    }
    if (!finished_) pump();
  }
  if (!finished_) throw Error(ErrorCode::ProgramInconsistent, "simulation stalled");

  res_.total_us = res_.kernels.back().end_us;
  res_.compute_us = 0;
  for (const auto& r : res_.kernels) res_.compute_us += r.end_us - r.start_us;

  // Transfer time hidden under kernel execution.
  std::vector<Window> busy;
  for (const auto& r : res_.kernels) busy.push_back({r.start_us, r.end_us});
  for (const auto& x : res_.transfers) {
    auto it = std::upper_bound(busy.begin(), busy.end(), x.start_us,
                               [](Micros t, const Window& w) { return t < w.end; });
    for (; it != busy.end() && it->begin < x.end_us; ++it) {
      res_.overlapped_migration_us +=
          std::min(it->end, x.end_us) - std::max(it->begin, x.start_us);
    }
  }
  return res_;
}

}  // namespace

SimResult simulate(const Program& program, const WorkloadTrace& actual, const DeviceConfig& config,
                   const SimOptions& options) {
  Simulator sim(program, actual, config, options);
  return sim.run();
}

SimResult ideal_run(const WorkloadTrace& trace, const DeviceConfig& config) {
  config.validate();
  SimResult r;
  Micros t = 0;
  for (int it = 0; it < config.num_iterations; ++it) {
    for (const auto& k : trace.kernels()) {
      KernelRun run;
      run.index = k.index;
      run.iteration = it;
      run.launch_us = t;
      run.start_us = t;
      t += k.duration_us;
      run.end_us = t;
      r.kernels.push_back(run);
    }
  }
  r.total_us = t;
  r.ideal_us = t;
  r.compute_us = t;
  r.event_log_hash = kFnvOffset;
  return r;
}

WorkloadTrace perturb_durations(const WorkloadTrace& trace, double pct, std::uint64_t seed) {
  if (!(pct >= 0.0 && pct < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "noise fraction must be in [0, 1)");
  }
  if (pct == 0.0) return trace;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(1.0 - pct, 1.0 + pct);
  std::vector<Micros> durations;
  for (const auto& k : trace.kernels()) {
    const double scaled = std::round(static_cast<double>(k.duration_us) * factor(rng));
    durations.push_back(std::max<Micros>(1, static_cast<Micros>(scaled)));
  }
  return trace.with_durations(durations);
}

}  // namespace tmig
