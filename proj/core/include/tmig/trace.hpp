// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tmig/types.hpp"

namespace tmig {

enum class TensorKind { Global, Intermediate, Unspecified };

struct TensorDescriptor {
  TensorId id = 0;
  Bytes size_bytes = 0;
  TensorKind kind = TensorKind::Unspecified;

  friend bool operator==(const TensorDescriptor&, const TensorDescriptor&) = default;
};

struct KernelRecord {
  int index = 0;
  std::string name;
  Micros duration_us = 0;
  std::vector<TensorId> inputs;   // sorted, unique
  std::vector<TensorId> outputs;  // sorted, unique

  friend bool operator==(const KernelRecord&, const KernelRecord&) = default;
};

/// One training iteration: tensor table plus kernels in serial execution order.
/// Immutable after construction; multi-iteration runs replay it.
class WorkloadTrace {
 public:
  WorkloadTrace() = default;

  /// Validates every invariant and throws Error on the first violation.
  WorkloadTrace(std::vector<TensorDescriptor> tensors, std::vector<KernelRecord> kernels,
                std::map<std::string, std::string> metadata = {});

  [[nodiscard]] const std::vector<TensorDescriptor>& tensors() const { return tensors_; }
  [[nodiscard]] const std::vector<KernelRecord>& kernels() const { return kernels_; }
  [[nodiscard]] const std::map<std::string, std::string>& metadata() const { return metadata_; }

  [[nodiscard]] std::size_t num_kernels() const { return kernels_.size(); }
  [[nodiscard]] bool has_tensor(TensorId id) const;
  [[nodiscard]] const TensorDescriptor& tensor(TensorId id) const;
  /// Dense position of a tensor id in tensors(), which is sorted by id.
  [[nodiscard]] std::size_t tensor_slot(TensorId id) const;
  [[nodiscard]] Micros total_duration() const;
  [[nodiscard]] Bytes total_tensor_bytes() const;

  /// Same tensors and metadata with new per-kernel durations.
  [[nodiscard]] WorkloadTrace with_durations(const std::vector<Micros>& durations) const;

  friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;

 private:
  std::vector<TensorDescriptor> tensors_;
  std::vector<KernelRecord> kernels_;
  std::map<std::string, std::string> metadata_;
};

/// Parses the JSON trace format. Errors: MalformedInput, DanglingTensorRef,
/// NonPositiveValue, DuplicateId.
WorkloadTrace parse_trace(std::string_view raw);

/// Canonical JSON form; parse_trace(serialize_trace(t)) == t.
std::string serialize_trace(const WorkloadTrace& trace);

WorkloadTrace load_trace(const std::string& path);

/// Inclusive uniform integer range used by the synthetic generator.
struct UniformRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;
};

struct SynthParams {
  int layers = 1;
  UniformRange act_size{1 << 20, 4 << 20};
  UniformRange weight_size{1 << 20, 4 << 20};
  UniformRange duration_us{200, 1000};
  std::uint64_t seed = 0;
};

/// Forward/backward layer chain: 2 * layers kernels. Forward kernel i reads
/// W_i (and A_{i-1}) and writes A_i; backward kernel 2L-1-i reads W_i, A_i
/// (and G_{i+1}) and writes G_i and dW_i. Deterministic per seed.
WorkloadTrace synthesize_trace(const SynthParams& params);

std::string_view to_string(TensorKind kind);

}  // namespace tmig
