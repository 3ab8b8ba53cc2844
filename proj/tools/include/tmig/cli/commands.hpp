// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tmig/cli/experiment.hpp"

namespace tmig::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitIo = 2;

/// Entry point shared by the binary and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One output row per (axis combination, policy), in axis order with the
/// last axis varying fastest. Runs on config.workers threads.
std::string run_sweep_csv(const ExperimentConfig& config);

std::string summary_csv(const std::vector<PolicyRun>& runs);
std::string kernels_csv(const SimResult& result);
std::string traffic_csv(const std::vector<PolicyRun>& runs);
std::string result_json(const std::vector<PolicyRun>& runs);

}  // namespace tmig::cli
