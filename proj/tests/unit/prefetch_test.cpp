// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tmig/pipeline.hpp"
#include "tmig/prefetch.hpp"

namespace tmig {
namespace {

using testing::kKiB;

// W (40 KiB) evicted to the SSD over its (25, 75) period.
PlannedEviction weight_entry() {
  EvictionCandidate c;
  c.period = {0, 25, 75, false};
  c.size_bytes = 40 * kKiB;
  c.destination = Destination::Ssd;
  c.evict = {25, 40};
  c.prefetch = {60, 75};
  return {c, 60, 60};
}

struct Fixture {
  MigrationPlan plan;
  ChannelReservations res{100};
  PeriodicCurve pressure;
  DeviceConfig cfg = testing::tiny_config();

  explicit Fixture(std::vector<PressureCurve::Point> after_eviction)
      : pressure(PressureCurve(std::move(after_eviction)), 100) {
    plan.iteration_us = 100;
    plan.evictions.push_back(weight_entry());
    res.reserve(ChannelKind::Ssd, Direction::FromDevice, {25, 40}, 0);
    res.reserve(ChannelKind::Ssd, Direction::ToDevice, {60, 75}, 0);
  }
};

TEST(LatestSafe, IdleChannel) {
  Fixture f({{0, 0}});
  EXPECT_EQ(latest_safe_prefetch_time(f.plan.evictions[0], 0, f.res, f.cfg), 60);
}

TEST(LatestSafe, BusyChannelPushesEarlier) {
  ChannelReservations res(100);
  res.reserve(ChannelKind::Ssd, Direction::ToDevice, {65, 75}, 7);
  EXPECT_EQ(latest_safe_prefetch_time(weight_entry(), 0, res, testing::tiny_config()), 50);
}

TEST(LatestSafe, NoEarlierSlot) {
  // The transfer fills everything between eviction end and period end.
  auto e = weight_entry();
  e.candidate.prefetch = {40, 75};
  ChannelReservations res(100);
  EXPECT_EQ(latest_safe_prefetch_time(e, 0, res, testing::tiny_config()), 40);
  res.reserve(ChannelKind::Ssd, Direction::ToDevice, {0, 100}, 3);
  EXPECT_EQ(latest_safe_prefetch_time(e, 0, res, testing::tiny_config()), 40);
}

TEST(LatestSafe, AssignResetsSchedule) {
  Fixture f({{0, 0}});
  f.plan.evictions[0].latest_safe_us = 0;
  f.plan.evictions[0].scheduled_us = 3;
  assign_latest_safe(f.plan, f.res, f.cfg);
  EXPECT_EQ(f.plan.evictions[0].latest_safe_us, 60);
  EXPECT_EQ(f.plan.evictions[0].scheduled_us, 60);
}

TEST(Eager, MovesToHeadroom) {
  Fixture f({{0, 80 * kKiB}, {40, 70 * kKiB}, {55, 30 * kKiB}, {60, 80 * kKiB}, {100, 0}});
  eager_reschedule(f.plan, f.pressure, f.res, f.cfg);
  const auto& e = f.plan.evictions[0];
  EXPECT_EQ(e.scheduled_us, 55);
  EXPECT_EQ(e.latest_safe_us, 60);
  EXPECT_EQ(e.candidate.prefetch, (Window{55, 70}));
  EXPECT_EQ(f.pressure.value_at(54), 70 * kKiB);
  EXPECT_EQ(f.pressure.value_at(55), 70 * kKiB);
  EXPECT_EQ(f.pressure.value_at(59), 70 * kKiB);
  EXPECT_TRUE(f.res.is_free(ChannelKind::Ssd, Direction::ToDevice, {70, 75}));
  EXPECT_FALSE(f.res.is_free(ChannelKind::Ssd, Direction::ToDevice, {55, 56}));
}

TEST(Eager, NoHeadroomKeepsLatest) {
  Fixture f({{0, 80 * kKiB}, {40, 70 * kKiB}, {60, 80 * kKiB}, {100, 0}});
  const auto before = f.plan;
  eager_reschedule(f.plan, f.pressure, f.res, f.cfg);
  EXPECT_EQ(f.plan, before);
}

TEST(Eager, RespectsOtherTransfers) {
  Fixture f({{0, 80 * kKiB}, {40, 70 * kKiB}, {55, 30 * kKiB}, {60, 80 * kKiB}, {100, 0}});
  f.res.reserve(ChannelKind::Ssd, Direction::ToDevice, {50, 58}, 5);
  eager_reschedule(f.plan, f.pressure, f.res, f.cfg);
  EXPECT_EQ(f.plan.evictions[0].scheduled_us, 58);
}

TEST(Eager, Idempotent) {
  Fixture f({{0, 80 * kKiB}, {40, 70 * kKiB}, {55, 30 * kKiB}, {60, 80 * kKiB}, {100, 0}});
  eager_reschedule(f.plan, f.pressure, f.res, f.cfg);
  const auto plan = f.plan;
  const auto pressure = f.pressure.curve();
  eager_reschedule(f.plan, f.pressure, f.res, f.cfg);
  EXPECT_EQ(f.plan, plan);
  EXPECT_EQ(f.pressure.curve(), pressure);
}

TEST(Eager, NeverRaisesPeakAboveCapacity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = testing::oversubscribed_instance(seed, 6, 1.5);
    PlannerOptions lazy;
    lazy.eager_prefetch = false;
    const auto late = plan_migrations(inst.trace, inst.config, lazy);
    const auto early = plan_migrations(inst.trace, inst.config);
    const Bytes cap = inst.config.gpu_mem_bytes;
    EXPECT_LE(early.state.pressure.max(), std::max(cap, late.state.pressure.max())) << seed;
    ASSERT_EQ(early.plan.evictions.size(), late.plan.evictions.size());
    for (std::size_t i = 0; i < early.plan.evictions.size(); ++i) {
      EXPECT_LE(early.plan.evictions[i].scheduled_us, late.plan.evictions[i].scheduled_us);
    }
  }
}

}  // namespace
}  // namespace tmig
