// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "tmig/baselines.hpp"

namespace {

void BM_SimulatePolicy(benchmark::State& state) {
  tmig::SynthParams p;
  p.layers = static_cast<int>(state.range(0));
  p.seed = 7;
  const auto trace = tmig::synthesize_trace(p);
  tmig::DeviceConfig cfg;
  cfg.gpu_mem_bytes = trace.total_tensor_bytes() / 2;
  const auto kind = static_cast<tmig::PolicyKind>(state.range(1));
  state.SetLabel(std::string(tmig::to_string(kind)));
  for (auto _ : state) benchmark::DoNotOptimize(tmig::run_policy(kind, trace, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.num_iterations *
                          static_cast<int64_t>(trace.num_kernels()));
}
BENCHMARK(BM_SimulatePolicy)
    ->ArgsProduct({{32, 200},
                   {static_cast<int64_t>(tmig::PolicyKind::BaseUvm),
                    static_cast<int64_t>(tmig::PolicyKind::DeepUmLike),
                    static_cast<int64_t>(tmig::PolicyKind::G10)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
