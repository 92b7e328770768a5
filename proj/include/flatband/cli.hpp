// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace flatband {

/// Exit statuses: 0 success, 1 a verification invariant failed, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `flatband` executable; `out` receives data when no
/// --out path is given, `err` receives diagnostics.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flatband
