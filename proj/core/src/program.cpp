// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/program.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace tmig {

std::string_view to_string(OpKind op) {
  switch (op) {
    case OpKind::Free: return "free";
    case OpKind::PreEvict: return "pre_evict";
    case OpKind::Alloc: return "alloc";
    case OpKind::Prefetch: return "prefetch";
  }
  return "alloc";
}

Micros Program::iteration_us() const {
  Micros sum = 0;
  for (const auto& k : kernels) sum += k.duration_us;
  return sum;
}

std::size_t Program::instruction_count() const {
  std::size_t n = 0;
  for (const auto& s : slots) n += s.size();
  return n;
}

namespace {

/// Anchor implied by an instruction's slot; emit and parse share this rule.
void set_anchor(MigrationInstruction& ins, std::size_t slot, std::size_t n) {
  if (slot == 0 || n == 0) {
    ins.anchor_kernel = 0;
    ins.side = AnchorSide::Before;
  } else if (slot >= n) {
    ins.anchor_kernel = static_cast<int>(n) - 1;
    ins.side = AnchorSide::After;
  } else if (ins.op == OpKind::Free || ins.op == OpKind::PreEvict) {
    ins.anchor_kernel = static_cast<int>(slot) - 1;
    ins.side = AnchorSide::After;
  } else {
    ins.anchor_kernel = static_cast<int>(slot);
    ins.side = AnchorSide::Before;
  }
}

bool instruction_less(const MigrationInstruction& a, const MigrationInstruction& b) {
  if (a.issue_time_us != b.issue_time_us) return a.issue_time_us < b.issue_time_us;
  if (a.op != b.op) return a.op < b.op;
  return a.tensor_id < b.tensor_id;
}

Micros fold(Micros t, Micros period) {
  if (period <= 0) return t;
  const Micros r = t % period;
  return r < 0 ? r + period : r;
}

}  // namespace

Program emit_program(const MigrationPlan& plan, const WorkloadTrace& trace,
                     const std::vector<TensorLifetime>& lifetimes, const Timeline& timeline) {
  Program prog;
  const std::size_t n = trace.num_kernels();
  for (const auto& k : trace.kernels()) prog.kernels.push_back({k.index, k.name, k.duration_us});
  prog.slots.assign(n + 1, {});

  const auto put = [&](MigrationInstruction ins, std::size_t slot) {
    set_anchor(ins, slot, n);
    prog.slots[slot].push_back(ins);
  };

  for (const auto& lt : lifetimes) {
    const Bytes size = trace.tensor(lt.tensor_id).size_bytes;
    const auto birth = static_cast<std::size_t>(lt.is_global ? 0 : lt.birth_kernel);
    put({OpKind::Alloc, lt.tensor_id, size, Target::None, 0, AnchorSide::Before,
         timeline.start_us[birth]},
        birth);
    if (!lt.is_global) {
      const auto death = static_cast<std::size_t>(lt.death_kernel);
      put({OpKind::Free, lt.tensor_id, size, Target::None, 0, AnchorSide::Before,
           timeline.end_us[death]},
          death + 1);
    }
  }

  const Micros period = timeline.total_us;
  for (const auto& e : plan.evictions) {
    const auto& c = e.candidate;
    const auto& p = c.period;
    if (c.evict.begin < p.start_us || c.evict.end > c.prefetch.begin ||
        c.prefetch.end > p.end_us || c.prefetch.begin != e.scheduled_us ||
        c.evict.length() <= 0 || c.prefetch.length() <= 0) {
      throw Error(ErrorCode::InconsistentPlan,
                  "transfer windows of tensor " + std::to_string(p.tensor_id) +
                      " fall outside its inactive period");
    }
    if (!trace.has_tensor(p.tensor_id) || trace.tensor(p.tensor_id).size_bytes != c.size_bytes) {
      throw Error(ErrorCode::InconsistentPlan, "plan references an unknown tensor");
    }

    // An eviction starting exactly at an iteration boundary closes the
    // iteration rather than opening the next one.
    Micros evict_at = fold(c.evict.begin, period);
    if (evict_at == 0 && c.evict.begin > 0) evict_at = period;
    std::size_t evict_slot = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (timeline.end_us[k] <= evict_at) evict_slot = k + 1;
    }
    put({OpKind::PreEvict, p.tensor_id, c.size_bytes,
         c.destination == Destination::Host ? Target::Host : Target::Ssd, 0, AnchorSide::After,
         evict_at},
        evict_slot);

    const Micros fetch_at = fold(e.scheduled_us, period);
    std::size_t fetch_slot = n;
    for (std::size_t k = n; k-- > 0;) {
      if (timeline.start_us[k] >= fetch_at) fetch_slot = k;
    }
    put({OpKind::Prefetch, p.tensor_id, c.size_bytes, Target::Gpu, 0, AnchorSide::Before,
         fetch_at},
        fetch_slot);
  }

  for (auto& slot : prog.slots) std::sort(slot.begin(), slot.end(), instruction_less);
  return prog;
}

std::string serialize_program(const Program& program) {
  std::ostringstream out;
  const auto emit_slot = [&](const std::vector<MigrationInstruction>& slot) {
    for (const auto& ins : slot) {
      out << "G10 " << to_string(ins.op) << ' ' << ins.tensor_id << ' ' << ins.size_bytes;
      if (ins.op == OpKind::PreEvict) out << (ins.target == Target::Host ? " host" : " ssd");
      out << " @" << ins.issue_time_us << '\n';
    }
  };
  for (std::size_t k = 0; k < program.kernels.size(); ++k) {
    if (k < program.slots.size()) emit_slot(program.slots[k]);
    const auto& kern = program.kernels[k];
    out << "KERNEL " << kern.index << ' ' << kern.name << ' ' << kern.duration_us << '\n';
  }
  if (program.slots.size() > program.kernels.size()) emit_slot(program.slots.back());
  return out.str();
}

namespace {

std::int64_t parse_int(std::string_view tok, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::MalformedInput,
                "line " + std::to_string(line_no) + ": expected integer, got '" + std::string(tok) +
                    "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program prog;
  std::vector<std::vector<MigrationInstruction>> slots(1);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": " + why);
    };
    if (tok[0] == "KERNEL") {
      if (tok.size() < 4) throw bad("KERNEL needs index, name and duration");
      ProgramKernel k;
      k.index = static_cast<int>(parse_int(tok[1], line_no));
      for (std::size_t i = 2; i + 1 < tok.size(); ++i) {
        if (i > 2) k.name += ' ';
        k.name += tok[i];
      }
      k.duration_us = parse_int(tok.back(), line_no);
      if (k.index != static_cast<int>(prog.kernels.size())) throw bad("kernel out of order");
      prog.kernels.push_back(std::move(k));
      slots.emplace_back();
    } else if (tok[0] == "G10") {
      if (tok.size() < 5) throw bad("G10 line too short");
      MigrationInstruction ins;
      if (tok[1] == "alloc") {
        ins.op = OpKind::Alloc;
      } else if (tok[1] == "free") {
        ins.op = OpKind::Free;
      } else if (tok[1] == "prefetch") {
        ins.op = OpKind::Prefetch;
        ins.target = Target::Gpu;
      } else if (tok[1] == "pre_evict") {
        ins.op = OpKind::PreEvict;
      } else {
        throw bad("unknown op '" + std::string(tok[1]) + "'");
      }
      ins.tensor_id = parse_int(tok[2], line_no);
      ins.size_bytes = parse_int(tok[3], line_no);
      std::size_t at = 4;
      if (ins.op == OpKind::PreEvict) {
        if (tok.size() != 6) throw bad("pre_evict needs a target");
        if (tok[4] == "ssd") {
          ins.target = Target::Ssd;
        } else if (tok[4] == "host") {
          ins.target = Target::Host;
        } else {
          throw bad("unknown target '" + std::string(tok[4]) + "'");
        }
        at = 5;
      } else if (tok.size() != 5) {
        throw bad("unexpected tokens");
      }
      if (tok[at].size() < 2 || tok[at][0] != '@') throw bad("missing @issue_time");
      ins.issue_time_us = parse_int(tok[at].substr(1), line_no);
      slots.back().push_back(ins);
    } else {
      throw bad("unknown record '" + std::string(tok[0]) + "'");
    }
  }
  const std::size_t n = prog.kernels.size();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    for (auto& ins : slots[s]) set_anchor(ins, s, n);
  }
  prog.slots = std::move(slots);
  return prog;
}

}  // namespace tmig
