// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "invariants.hpp"

namespace tmig {
namespace {

TEST(Invariants, RandomTraces) {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 1000; ++i) {
    const auto c = testing::random_case(rng);
    ASSERT_EQ(testing::check_all_invariants(c), "") << "case " << i;
  }
}

TEST(Invariants, SyntheticModels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = testing::oversubscribed_instance(seed, 2 + static_cast<int>(seed % 12),
                                                 1.2 + 0.1 * static_cast<double>(seed % 10));
    inst.config.host_mem_bytes = seed % 2 == 0 ? 0 : inst.config.gpu_mem_bytes / 4;
    testing::Case c{inst.trace, inst.config, {}};
    ASSERT_EQ(testing::check_all_invariants(c), "") << "seed " << seed;
  }
}

TEST(Invariants, PlannedPressureNeverRises) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    ASSERT_EQ(testing::check_pressure_monotone(testing::random_case(rng)), "") << i;
  }
}

TEST(Invariants, AlternationCheckerCatchesBadPrograms) {
  const auto trace = testing::tiny_trace(true);
  auto program = plan_migrations(trace, testing::tiny_config()).program;
  ASSERT_EQ(testing::check_alternation(program, trace), "");
  auto doubled = program;
  for (auto& slot : doubled.slots) {
    for (const auto& ins : std::vector(slot)) {
      if (ins.op == OpKind::Prefetch) slot.push_back(ins);
    }
  }
  EXPECT_NE(testing::check_alternation(doubled, trace), "");
  auto two_allocs = program;
  two_allocs.slots[2].push_back(program.slots[0].front());
  EXPECT_NE(testing::check_alternation(two_allocs, trace), "");
}

TEST(Invariants, ConservationCheckerCatchesDrift) {
  const auto inst = testing::oversubscribed_instance(4, 6, 2.0);
  const auto bundle = plan_migrations(inst.trace, inst.config);
  auto r = simulate(bundle.program, inst.trace, inst.config);
  ASSERT_EQ(testing::check_conservation(r), "");
  ASSERT_FALSE(r.transfers.empty());
  r.transfers.pop_back();
  EXPECT_NE(testing::check_conservation(r), "");
}

}  // namespace
}  // namespace tmig
