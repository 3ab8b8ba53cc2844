// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmig/baselines.hpp"
#include "tmig/config.hpp"

namespace tmig::cli {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

/// Everything a config file can set. Keys in the file match field names.
struct ExperimentConfig {
  DeviceConfig device;
  std::vector<PolicyKind> policy{PolicyKind::G10};
  std::string trace;
  std::string out = ".";
  std::uint64_t seed = 0;
  double noise_pct = 0.0;
  int workers = 1;
  bool eager_prefetch = true;
  Micros min_period_us = 0;
  int deepum_lookahead = 1;
  std::vector<SweepAxis> sweep;

  [[nodiscard]] PolicyOptions policy_options() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Sets one key. Throws MalformedInput for unknown keys or bad values and
/// InvalidParams for out-of-range ones.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines; `#` starts a comment. Validates the device config.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Integer bytes with an optional KB/MB/GB/TB (10^3) or KiB/MiB/GiB/TiB suffix.
Bytes parse_bytes(std::string_view text);

/// Keys a sweep may vary.
bool is_sweep_key(std::string_view key);

}  // namespace tmig::cli
