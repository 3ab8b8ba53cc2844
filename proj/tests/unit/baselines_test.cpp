// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tmig/baselines.hpp"

namespace tmig {
namespace {

using testing::kKiB;

// Faults after the first iteration, bucketed by enqueue time.
std::int64_t late_faults(const SimResult& r, Micros iteration_us) {
  std::int64_t n = 0;
  for (const auto& x : r.transfers) n += x.fault && x.enqueue_us >= iteration_us;
  return n;
}

TEST(Policy, ParseNames) {
  EXPECT_EQ(parse_policy("g10"), PolicyKind::G10);
  EXPECT_EQ(parse_policy("base-uvm"), PolicyKind::BaseUvm);
  EXPECT_EQ(parse_policy("base_uvm"), PolicyKind::BaseUvm);
  EXPECT_EQ(parse_policy("DeepUm-Like"), PolicyKind::DeepUmLike);
  EXPECT_EQ(parse_policy("g10-ssd-only"), PolicyKind::G10SsdOnly);
  EXPECT_EQ(parse_policy("nope"), std::nullopt);
  for (auto k : {PolicyKind::Ideal, PolicyKind::BaseUvm, PolicyKind::DeepUmLike,
                 PolicyKind::FlashNeuronLike, PolicyKind::G10, PolicyKind::G10SsdOnly}) {
    EXPECT_EQ(parse_policy(to_string(k)), k);
  }
}

TEST(Lru, EvictsLeastRecentlyUsed) {
  // Tensor 0 was last touched by K3, tensor 1 by K7; K8 needs tensor 2.
  std::vector<KernelRecord> ks;
  for (int k = 0; k < 9; ++k) {
    TensorId use = 3;
    if (k == 3) use = 0;
    if (k == 7) use = 1;
    if (k == 8) use = 2;
    ks.push_back({k, "K" + std::to_string(k), 10, {use}, {}});
  }
  const WorkloadTrace t({{0, 16 * kKiB, TensorKind::Global},
                         {1, 16 * kKiB, TensorKind::Global},
                         {2, 16 * kKiB, TensorKind::Global},
                         {3, 4 * kKiB, TensorKind::Global}},
                        ks);
  auto cfg = testing::tiny_config();
  cfg.gpu_mem_bytes = 36 * kKiB;
  cfg.num_iterations = 1;
  const auto r = run_policy(PolicyKind::BaseUvm, t, cfg).result;
  const TransferRecord* first_out = nullptr;
  for (const auto& x : r.transfers) {
    if (x.direction == Direction::FromDevice) {
      first_out = &x;
      break;
    }
  }
  ASSERT_NE(first_out, nullptr);
  EXPECT_EQ(first_out->tensor_id, 0);
  EXPECT_EQ(r.fault_count, 1);
}

TEST(BaseUvm, NoFaultsWhenEverythingFits) {
  SynthParams p;
  p.layers = 8;
  const auto t = synthesize_trace(p);
  DeviceConfig cfg;
  cfg.gpu_mem_bytes = t.total_tensor_bytes();
  const auto r = run_policy(PolicyKind::BaseUvm, t, cfg).result;
  EXPECT_EQ(r.fault_count, 0);
  EXPECT_EQ(r.total_us, r.ideal_us);
}

TEST(BaseUvm, FaultsWhenOversubscribed) {
  const auto inst = testing::oversubscribed_instance(3, 8, 2.0);
  const auto r = run_policy(PolicyKind::BaseUvm, inst.trace, inst.config).result;
  EXPECT_GT(r.fault_count, 0);
  EXPECT_GT(late_faults(r, inst.trace.total_duration()), 0);
  EXPECT_GT(r.total_us, r.ideal_us);
}

TEST(FlashNeuron, EmptyPlanWhenItFits) {
  auto cfg = testing::tiny_config();
  cfg.gpu_mem_bytes = 1 << 20;
  const auto t = testing::tiny_trace(true);
  const auto fn = flashneuron_policy(t, analyze_trace(t), cfg);
  EXPECT_FALSE(fn.infeasible);
  EXPECT_TRUE(fn.plan.evictions.empty());
}

TEST(FlashNeuron, IntermediatesToSsdOnly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = testing::oversubscribed_instance(seed, 10, 1.5);
    const auto a = analyze_trace(inst.trace);
    const auto fn = flashneuron_policy(inst.trace, a, inst.config);
    EXPECT_FALSE(fn.plan.evictions.empty());
    for (const auto& e : fn.plan.evictions) {
      EXPECT_EQ(e.candidate.destination, Destination::Ssd);
      EXPECT_EQ(a.kinds.at(e.candidate.period.tensor_id), TensorKind::Intermediate);
    }
    const auto run = run_policy(PolicyKind::FlashNeuronLike, inst.trace, inst.config);
    EXPECT_EQ(run.result.traffic.host_in + run.result.traffic.host_out, 0);
  }
}

TEST(FlashNeuron, InfeasibleWithoutIntermediates) {
  // Only weights, and they do not fit.
  const WorkloadTrace t({{0, 64 * kKiB, TensorKind::Global}, {1, 64 * kKiB, TensorKind::Global}},
                        {{0, "K0", 10, {0}, {}}, {1, "K1", 10, {1}, {}}, {2, "K2", 10, {0}, {}}});
  auto cfg = testing::tiny_config();
  cfg.gpu_mem_bytes = 100 * kKiB;
  EXPECT_TRUE(flashneuron_policy(t, analyze_trace(t), cfg).infeasible);
  EXPECT_TRUE(run_policy(PolicyKind::FlashNeuronLike, t, cfg).infeasible);
}

TEST(DeepUm, FewerFaultsAfterRecording) {
  std::int64_t base = 0, deepum = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = testing::oversubscribed_instance(seed, 10, 1.5);
    const Micros T = inst.trace.total_duration();
    base += late_faults(run_policy(PolicyKind::BaseUvm, inst.trace, inst.config).result, T);
    deepum += late_faults(run_policy(PolicyKind::DeepUmLike, inst.trace, inst.config).result, T);
  }
  EXPECT_LT(deepum, base);
}

TEST(DeepUm, RecordsFirstIterationOnly) {
  DeepUmHooks h(5, 2);
  h.on_fault(0, 3, 11);
  h.on_fault(0, 3, 11);
  h.on_fault(0, 4, 12);
  h.on_fault(1, 0, 13);
  EXPECT_EQ(h.recorded()[3], std::vector<TensorId>{11});
  EXPECT_TRUE(h.recorded()[0].empty());
  EXPECT_TRUE(h.prefetch_at_start(0, 1).empty());
  EXPECT_EQ(h.prefetch_at_start(1, 1), std::vector<TensorId>{11});
  // The lookahead stops at the last kernel.
  EXPECT_EQ(h.prefetch_at_start(1, 3), std::vector<TensorId>{12});
  EXPECT_EQ(h.prefetch_at_start(2, 4), std::vector<TensorId>{12});
  DeepUmHooks zero(2, -5);
  zero.on_fault(0, 1, 4);
  EXPECT_EQ(zero.prefetch_at_start(1, 1), std::vector<TensorId>{4});
}

TEST(Ideal, MatchesSerialDurations) {
  const auto inst = testing::oversubscribed_instance(1, 6, 2.0);
  const auto r = run_policy(PolicyKind::Ideal, inst.trace, inst.config).result;
  EXPECT_EQ(r.total_us, inst.config.num_iterations * inst.trace.total_duration());
  EXPECT_EQ(r.stall_us, 0);
}

TEST(G10, BeatsDemandPaging) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = testing::oversubscribed_instance(seed, 10, 2.0);
    const auto g10 = run_policy(PolicyKind::G10, inst.trace, inst.config);
    const auto uvm = run_policy(PolicyKind::BaseUvm, inst.trace, inst.config);
    ASSERT_TRUE(g10.plan);
    EXPECT_LE(g10.result.total_us, uvm.result.total_us) << seed;
    EXPECT_GE(g10.result.total_us, g10.result.ideal_us);
  }
}

}  // namespace
}  // namespace tmig
