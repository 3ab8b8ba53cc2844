// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/plan_io.hpp"

#include <nlohmann/json.hpp>

namespace tmig {

namespace {

nlohmann::ordered_json window_json(Micros a, Micros b) {
  return nlohmann::ordered_json::array({a, b});
}

}  // namespace

std::string plan_to_json(const MigrationPlan& plan) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["evictions"] = ojson::array();
  for (const auto& e : plan.evictions) {
    const auto& c = e.candidate;
    ojson row;
    row["tensor_id"] = c.period.tensor_id;
    row["period"] = window_json(c.period.start_us, c.period.end_us);
    row["dest"] = std::string(to_string(c.destination));
    row["evict"] = window_json(c.evict.begin, c.evict.end);
    row["prefetch"] = window_json(c.prefetch.begin, c.prefetch.end);
    row["benefit"] = c.benefit;
    row["cost_us"] = c.cost_us;
    row["latest_safe_us"] = e.latest_safe_us;
    row["scheduled_us"] = e.scheduled_us;
    doc["evictions"].push_back(std::move(row));
  }
  doc["residual_overflow"] = plan.residual_overflow;
  doc["unschedulable"] = ojson::array();
  for (const auto& p : plan.unschedulable) {
    ojson row;
    row["tensor_id"] = p.tensor_id;
    row["period"] = window_json(p.start_us, p.end_us);
    doc["unschedulable"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

}  // namespace tmig
