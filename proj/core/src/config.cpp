// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/config.hpp"

#include <algorithm>
#include <cmath>

namespace tmig {

Micros transfer_time(Bytes size, const ChannelConfig& channel, Direction direction) {
  const Bytes bw = channel.bandwidth(direction);
  if (bw <= 0) throw Error(ErrorCode::InvalidParams, "channel bandwidth must be > 0");
  const Bytes whole = size > 0 ? (size + bw - 1) / bw : 0;
  return channel.latency(direction) + whole;
}

Bytes gbps_to_bytes_per_us(double gbps) {
  // 1 GB/s is exactly 1000 B/us; the epsilon keeps values like 4.096 from
  // flooring to 4095 after binary rounding.
  return static_cast<Bytes>(std::floor(gbps * 1000.0 + 1e-6));
}

void DeviceConfig::validate() const {
  const auto fail = [](const char* what) { throw Error(ErrorCode::InvalidParams, what); };
  if (gpu_mem_bytes <= 0) fail("gpu_mem_bytes must be > 0");
  if (host_mem_bytes < 0) fail("host_mem_bytes must be >= 0");
  if (ssd_capacity_bytes <= 0) fail("ssd_capacity_bytes must be > 0");
  if (gbps_to_bytes_per_us(ssd_read_bw) <= 0) fail("ssd_read_bw must be >= 0.001 GB/s");
  if (gbps_to_bytes_per_us(ssd_write_bw) <= 0) fail("ssd_write_bw must be >= 0.001 GB/s");
  if (gbps_to_bytes_per_us(pcie_bw) <= 0) fail("pcie_bw must be >= 0.001 GB/s");
  if (ssd_read_latency_us < 0 || ssd_write_latency_us < 0 || pcie_latency_us < 0) {
    fail("latencies must be >= 0");
  }
  if (fault_handling_us < 0) fail("fault_handling_us must be >= 0");
  if (page_size_bytes <= 0) fail("page_size_bytes must be > 0");
  if (fault_chunk_bytes <= 0 || fault_chunk_bytes % page_size_bytes != 0) {
    fail("fault_chunk_bytes must be a positive multiple of page_size_bytes");
  }
  if (num_iterations < 1) fail("num_iterations must be >= 1");
  if (!(hp_utilization_threshold >= 0.0 && hp_utilization_threshold <= 1.0)) {
    fail("hp_utilization_threshold must be in [0, 1]");
  }
}

ChannelConfig DeviceConfig::channel(ChannelKind kind) const {
  const Bytes pcie = gbps_to_bytes_per_us(pcie_bw);
  if (kind == ChannelKind::Host) {
    return ChannelConfig{pcie, pcie, pcie_latency_us, pcie_latency_us};
  }
  return ChannelConfig{std::min(gbps_to_bytes_per_us(ssd_read_bw), pcie),
                       std::min(gbps_to_bytes_per_us(ssd_write_bw), pcie), ssd_read_latency_us,
                       ssd_write_latency_us};
}

Micros fault_service_time(Bytes size, ChannelKind source, const DeviceConfig& config) {
  const ChannelConfig ch = config.channel(source);
  Micros total = 0;
  for (Bytes done = 0; done < size; done += config.fault_chunk_bytes) {
    const Bytes chunk = std::min(config.fault_chunk_bytes, size - done);
    total += config.fault_handling_us + transfer_time(chunk, ch, Direction::ToDevice);
  }
  return total;
}

double estimate_ssd_lifetime(double dwpd, double rated_days, double capacity_bytes,
                             double sustained_bw_bytes_per_s, double write_fraction) {
  if (!(dwpd > 0) || !(rated_days > 0) || !(capacity_bytes > 0) ||
      !(sustained_bw_bytes_per_s > 0) || !(write_fraction > 0 && write_fraction <= 1)) {
    throw Error(ErrorCode::InvalidParams,
                "lifetime inputs must be > 0 with 0 < write_fraction <= 1");
  }
  const double endurance_bytes = dwpd * rated_days * capacity_bytes;
  const double seconds = endurance_bytes / (sustained_bw_bytes_per_s * write_fraction);
  return seconds / (365.0 * 86400.0);
}

}  // namespace tmig
