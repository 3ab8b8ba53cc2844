// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tmig/types.hpp"

namespace tmig {

enum class ChannelKind { Host, Ssd };
enum class Direction { ToDevice, FromDevice };

/// One duplex link between GPU memory and a backing store. Bandwidths are
/// integer bytes per microsecond.
struct ChannelConfig {
  Bytes to_device_bw = 1;
  Bytes from_device_bw = 1;
  Micros to_device_latency_us = 0;
  Micros from_device_latency_us = 0;

  [[nodiscard]] Bytes bandwidth(Direction d) const {
    return d == Direction::ToDevice ? to_device_bw : from_device_bw;
  }
  [[nodiscard]] Micros latency(Direction d) const {
    return d == Direction::ToDevice ? to_device_latency_us : from_device_latency_us;
  }
};

/// latency + ceil(size / bandwidth).
Micros transfer_time(Bytes size, const ChannelConfig& channel, Direction direction);

/// GB/s (10^9 bytes) to whole bytes per microsecond, rounded down.
Bytes gbps_to_bytes_per_us(double gbps);

struct DeviceConfig {
  Bytes gpu_mem_bytes = 40'000'000'000;
  Bytes host_mem_bytes = 128'000'000'000;
  Bytes ssd_capacity_bytes = 3'200'000'000'000;
  double ssd_read_bw = 3.2;   // GB/s
  double ssd_write_bw = 3.0;  // GB/s
  Micros ssd_read_latency_us = 20;
  Micros ssd_write_latency_us = 16;
  double pcie_bw = 15.754;  // GB/s
  Micros pcie_latency_us = 3;
  Bytes page_size_bytes = 4096;
  Micros fault_handling_us = 45;
  Bytes fault_chunk_bytes = 2 * 1024 * 1024;
  int num_iterations = 3;
  double hp_utilization_threshold = 0.90;

  /// Throws InvalidParams on the first violated invariant.
  void validate() const;

  /// SSD bandwidth is capped by PCIe in each direction.
  [[nodiscard]] ChannelConfig channel(ChannelKind kind) const;

  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

/// Service time for a demand fault: the tensor moves in fault_chunk_bytes
/// pieces, each paying the fault handling latency plus a transfer.
Micros fault_service_time(Bytes size, ChannelKind source, const DeviceConfig& config);

/// Years until the rated write endurance is exhausted under a sustained
/// write stream of sustained_bw_bytes_per_s * write_fraction.
double estimate_ssd_lifetime(double dwpd, double rated_days, double capacity_bytes,
                             double sustained_bw_bytes_per_s, double write_fraction);

}  // namespace tmig
