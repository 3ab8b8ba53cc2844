// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace tmig {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Fixed-point text with the given number of fractional digits.
std::string format_fixed(double value, int digits);

}  // namespace tmig
