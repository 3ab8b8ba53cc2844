// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "tmig/eviction.hpp"

namespace tmig {

/// Canonical JSON for a plan; byte-stable for identical plans.
std::string plan_to_json(const MigrationPlan& plan);

}  // namespace tmig
