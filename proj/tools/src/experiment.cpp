// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/cli/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmig/format.hpp"

namespace tmig::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

Error bad_value(std::string_view key, std::string_view value, const char* what) {
  return Error(ErrorCode::MalformedInput, "config key '" + std::string(key) + "': '" +
                                              std::string(value) + "' is not " + what);
}

std::int64_t parse_int(std::string_view key, std::string_view v) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw bad_value(key, v, "an integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw bad_value(key, v, "a number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw bad_value(key, v, "a boolean");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

Bytes parse_bytes(std::string_view text) {
  text = trim(text);
  struct Suffix {
    std::string_view name;
    double mult;
  };
  static constexpr Suffix kSuffixes[] = {
      {"KiB", 1024.0}, {"MiB", 1048576.0}, {"GiB", 1073741824.0}, {"TiB", 1099511627776.0},
      {"KB", 1e3},     {"MB", 1e6},        {"GB", 1e9},          {"TB", 1e12},
      {"B", 1.0},
  };
  double mult = 1.0;
  for (const auto& s : kSuffixes) {
    if (text.size() > s.name.size() && text.substr(text.size() - s.name.size()) == s.name) {
      mult = s.mult;
      text = trim(text.substr(0, text.size() - s.name.size()));
      break;
    }
  }
  if (mult == 1.0) return parse_int("bytes", text);
  const double value = parse_double("bytes", text) * mult;
  const double rounded = std::round(value);
  if (std::fabs(value - rounded) > 1e-6 * std::max(1.0, std::fabs(value))) {
    throw bad_value("bytes", text, "a whole number of bytes");
  }
  return static_cast<Bytes>(rounded);
}

bool is_sweep_key(std::string_view key) {
  return key == "trace" || key == "host_mem_bytes" || key == "ssd_read_bw" ||
         key == "ssd_write_bw" || key == "ssd_bw" || key == "noise_pct" || key == "policy";
}

PolicyOptions ExperimentConfig::policy_options() const {
  PolicyOptions o;
  o.noise_pct = noise_pct;
  o.seed = seed;
  o.eager_prefetch = eager_prefetch;
  o.min_period_us = min_period_us;
  o.deepum_lookahead = deepum_lookahead;
  return o;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  auto& d = c.device;
  if (key.substr(0, 6) == "sweep.") {
    const auto axis = key.substr(6);
    if (!is_sweep_key(axis)) {
      throw Error(ErrorCode::MalformedInput, "unknown sweep axis '" + std::string(axis) + "'");
    }
    auto values = split_list(value);
    if (values.empty()) throw bad_value(key, value, "a non-empty list");
    // Validate each value against a scratch config.
    for (const auto& v : values) {
      ExperimentConfig probe = c;
      probe.sweep.clear();
      if (axis == "ssd_bw") {
        set_config_value(probe, "ssd_read_bw", v);
      } else {
        set_config_value(probe, axis, v);
      }
    }
    for (auto& a : c.sweep) {
      if (a.key == axis) {
        a.values = std::move(values);
        return;
      }
    }
    c.sweep.push_back({std::string(axis), std::move(values)});
    return;
  }

  if (key == "gpu_mem_bytes") {
    d.gpu_mem_bytes = parse_bytes(value);
  } else if (key == "host_mem_bytes") {
    d.host_mem_bytes = parse_bytes(value);
  } else if (key == "ssd_capacity_bytes") {
    d.ssd_capacity_bytes = parse_bytes(value);
  } else if (key == "ssd_read_bw") {
    d.ssd_read_bw = parse_double(key, value);
  } else if (key == "ssd_write_bw") {
    d.ssd_write_bw = parse_double(key, value);
  } else if (key == "ssd_bw") {
    d.ssd_read_bw = d.ssd_write_bw = parse_double(key, value);
  } else if (key == "ssd_read_latency_us") {
    d.ssd_read_latency_us = parse_int(key, value);
  } else if (key == "ssd_write_latency_us") {
    d.ssd_write_latency_us = parse_int(key, value);
  } else if (key == "pcie_bw") {
    d.pcie_bw = parse_double(key, value);
  } else if (key == "pcie_latency_us") {
    d.pcie_latency_us = parse_int(key, value);
  } else if (key == "page_size_bytes") {
    d.page_size_bytes = parse_bytes(value);
  } else if (key == "fault_handling_us") {
    d.fault_handling_us = parse_int(key, value);
  } else if (key == "fault_chunk_bytes") {
    d.fault_chunk_bytes = parse_bytes(value);
  } else if (key == "num_iterations") {
    d.num_iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "hp_utilization_threshold") {
    d.hp_utilization_threshold = parse_double(key, value);
  } else if (key == "policy") {
    std::vector<PolicyKind> list;
    for (const auto& name : split_list(value)) {
      auto p = parse_policy(name);
      if (!p) throw bad_value(key, name, "a known policy");
      list.push_back(*p);
    }
    if (list.empty()) throw bad_value(key, value, "a policy list");
    c.policy = std::move(list);
  } else if (key == "trace") {
    c.trace = std::string(value);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "seed") {
    const auto s = parse_int(key, value);
    if (s < 0) throw bad_value(key, value, "a non-negative integer");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "noise_pct") {
    c.noise_pct = parse_double(key, value);
    if (!(c.noise_pct >= 0.0 && c.noise_pct < 1.0)) {
      throw Error(ErrorCode::InvalidParams, "noise_pct must be in [0, 1)");
    }
  } else if (key == "workers") {
    c.workers = static_cast<int>(parse_int(key, value));
    if (c.workers < 1) throw Error(ErrorCode::InvalidParams, "workers must be >= 1");
  } else if (key == "eager_prefetch") {
    c.eager_prefetch = parse_bool(key, value);
  } else if (key == "min_period_us") {
    c.min_period_us = parse_int(key, value);
  } else if (key == "deepum_lookahead") {
    c.deepum_lookahead = static_cast<int>(parse_int(key, value));
  } else {
    throw Error(ErrorCode::MalformedInput, "unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedInput,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.device.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto& d = c.device;
  out << "gpu_mem_bytes = " << d.gpu_mem_bytes << '\n'
      << "host_mem_bytes = " << d.host_mem_bytes << '\n'
      << "ssd_capacity_bytes = " << d.ssd_capacity_bytes << '\n'
      << "ssd_read_bw = " << format_double(d.ssd_read_bw) << '\n'
      << "ssd_write_bw = " << format_double(d.ssd_write_bw) << '\n'
      << "ssd_read_latency_us = " << d.ssd_read_latency_us << '\n'
      << "ssd_write_latency_us = " << d.ssd_write_latency_us << '\n'
      << "pcie_bw = " << format_double(d.pcie_bw) << '\n'
      << "pcie_latency_us = " << d.pcie_latency_us << '\n'
      << "page_size_bytes = " << d.page_size_bytes << '\n'
      << "fault_handling_us = " << d.fault_handling_us << '\n'
      << "fault_chunk_bytes = " << d.fault_chunk_bytes << '\n'
      << "num_iterations = " << d.num_iterations << '\n'
      << "hp_utilization_threshold = " << format_double(d.hp_utilization_threshold) << '\n';
  out << "policy = ";
  for (std::size_t i = 0; i < c.policy.size(); ++i) {
    out << (i ? ", " : "") << to_string(c.policy[i]);
  }
  out << '\n';
  if (!c.trace.empty()) out << "trace = " << c.trace << '\n';
  out << "out = " << c.out << '\n'
      << "seed = " << c.seed << '\n'
      << "noise_pct = " << format_double(c.noise_pct) << '\n'
      << "workers = " << c.workers << '\n'
      << "eager_prefetch = " << (c.eager_prefetch ? "true" : "false") << '\n'
      << "min_period_us = " << c.min_period_us << '\n'
      << "deepum_lookahead = " << c.deepum_lookahead << '\n';
  for (const auto& axis : c.sweep) {
    out << "sweep." << axis.key << " = ";
    for (std::size_t i = 0; i < axis.values.size(); ++i) out << (i ? ", " : "") << axis.values[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace tmig::cli
