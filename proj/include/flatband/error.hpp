// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace flatband {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// epsilon too close to 2: r collapses to 1 and every bound degenerates.
struct DegenerateParameters : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// No closed form exists for the request (half-odd two-point functions).
struct UnsupportedAnalyticForm : std::logic_error {
  using std::logic_error::logic_error;
};

/// Iteration cap hit, non-PD Gram matrix, eigensolver stall.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace flatband
