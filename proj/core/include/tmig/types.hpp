// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tmig {

// Time is integer microseconds and sizes are integer bytes everywhere.
using Micros = std::int64_t;
using Bytes = std::int64_t;
using TensorId = std::int64_t;

/// Half-open time window [begin, end).
struct Window {
  Micros begin = 0;
  Micros end = 0;

  [[nodiscard]] Micros length() const { return end - begin; }
  friend bool operator==(const Window&, const Window&) = default;
};

enum class ErrorCode {
  MalformedInput,
  DanglingTensorRef,
  NonPositiveValue,
  DuplicateId,
  InvalidParams,
  NoBeneficialCandidate,
  CapacityViolation,
  InconsistentPlan,
  ProgramInconsistent,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tmig
