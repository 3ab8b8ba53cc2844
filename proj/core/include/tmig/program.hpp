// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tmig/analysis.hpp"
#include "tmig/eviction.hpp"

namespace tmig {

// Declaration order is the tie-break order between kernels.
enum class OpKind { Free, PreEvict, Alloc, Prefetch };
enum class Target { None, Ssd, Host, Gpu };
enum class AnchorSide { Before, After };

struct MigrationInstruction {
  OpKind op = OpKind::Alloc;
  TensorId tensor_id = 0;
  Bytes size_bytes = 0;
  Target target = Target::None;
  int anchor_kernel = 0;
  AnchorSide side = AnchorSide::Before;
  Micros issue_time_us = 0;  // within [0, iteration length]
  friend bool operator==(const MigrationInstruction&, const MigrationInstruction&) = default;
};

struct ProgramKernel {
  int index = 0;
  std::string name;
  Micros duration_us = 0;
  friend bool operator==(const ProgramKernel&, const ProgramKernel&) = default;
};

/// One iteration of kernels with migration instructions between them.
/// slots[s] holds the instructions that run before kernel s; slots[n] runs
/// after the last kernel.
struct Program {
  std::vector<ProgramKernel> kernels;
  std::vector<std::vector<MigrationInstruction>> slots;

  [[nodiscard]] Micros iteration_us() const;
  [[nodiscard]] std::size_t instruction_count() const;
  friend bool operator==(const Program&, const Program&) = default;
};

/// Lowers a plan into the instruction stream. Throws InconsistentPlan when a
/// transfer window falls outside its period.
Program emit_program(const MigrationPlan& plan, const WorkloadTrace& trace,
                     const std::vector<TensorLifetime>& lifetimes, const Timeline& timeline);

std::string serialize_program(const Program& program);
/// Throws MalformedInput. Anchors are rebuilt from each line's position.
Program parse_program(std::string_view text);

std::string_view to_string(OpKind op);

}  // namespace tmig
