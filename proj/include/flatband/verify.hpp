// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// Verification suites shared by `flatband verify` and the acceptance binary.
// Each suite reports named invariants with the worst observed value and the
// threshold it was held to.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "flatband/model.hpp"
#include "flatband/normfunc.hpp"

namespace flatband {

struct CheckResult {
  std::string invariant;
  bool pass = true;
  double worst = 0;      // largest observed error (or smallest margin, see detail)
  double threshold = 0;
  long evaluated = 0;
  long violations = 0;
  std::string detail;
};

struct SuiteResult {
  int id = 0;  // 1..10 for the acceptance criteria, 0 for the point suite
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0;

  bool pass() const;
};

struct VerifyOptions {
  std::vector<int> Ls{3, 5};
  /// Applied to every recursion-built B table the suites compare against oracles.
  Perturbation fault{};
};

/// The (lambda, |q|, theta) grid: 3 x 3 x 3 points, zeta = 1.
std::vector<ModelParams> standard_grid();

SuiteResult criterion_zero_energy(const VerifyOptions& o);        // 1
SuiteResult criterion_ground_space(const VerifyOptions& o);       // 2
SuiteResult criterion_recursion(const VerifyOptions& o);          // 3
SuiteResult criterion_bounds(const VerifyOptions& o);             // 4
SuiteResult criterion_convergence(const VerifyOptions& o);        // 5
SuiteResult criterion_domain_wall_profile(const VerifyOptions& o);  // 6
SuiteResult criterion_observables_vs_oracle(const VerifyOptions& o);  // 7
SuiteResult criterion_cluster(const VerifyOptions& o);            // 8
SuiteResult criterion_sum_rules(const VerifyOptions& o);          // 9
SuiteResult criterion_symmetry(const VerifyOptions& o);           // 10

SuiteResult run_criterion(int id, const VerifyOptions& o);

/// Checks at one user-supplied parameter point on lattice L (L <= 7): the
/// B recursion (or the |q| = 1 closed form) against Gram determinants,
/// H Psi = 0, and, for L <= 5, every analytic observable against the oracle.
SuiteResult point_suite(const ModelParams& p, int L, const VerifyOptions& o);

nlohmann::ordered_json to_json(const SuiteResult& r);

}  // namespace flatband
