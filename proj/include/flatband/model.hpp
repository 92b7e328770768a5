// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace flatband {

using cplx = std::complex<double>;

/// Lattice coordinate x stored as 2x.
struct Site {
  int half_units = 0;

  static constexpr Site integer(int x) { return Site{2 * x}; }
  static constexpr Site half(int two_x) { return Site{two_x}; }

  constexpr bool on_integer() const { return half_units % 2 == 0; }
  constexpr double coordinate() const { return 0.5 * half_units; }
  /// Integer coordinate; throws for half-odd sites.
  int as_integer() const;

  friend constexpr bool operator==(Site a, Site b) = default;
  friend constexpr auto operator<=>(Site a, Site b) = default;
};

std::string to_string(Site s);

struct Lattice {
  int L = 0;
  int l = 0;
  std::vector<Site> sites;  // ascending

  std::size_t size() const { return sites.size(); }
  bool contains(Site s) const { return s.half_units >= -L && s.half_units <= L; }
  std::vector<Site> integer_sites() const;
  std::vector<Site> half_sites() const;
};

Lattice build_lattice(int L);

struct ModelParams {
  double t = 1.0;
  double U = 1.0;
  double lambda = 1.0;
  double q_abs = 1.0;
  double theta = 0.0;
  double zeta_abs = 1.0;
  double zeta_phase = 0.0;

  cplx q() const { return std::polar(q_abs, theta); }
  cplx zeta() const { return std::polar(zeta_abs, zeta_phase); }
};

struct DerivedConstants {
  double epsilon = 0;
  double r = 0;
  double p = 0;
  double q_abs = 1;
  double log_q = 0;  // s = ln|q|
  double log_zeta = 0;  // ln|zeta|, -inf for zeta = 0
  std::optional<double> z;  // set iff |q| != 1; +-inf for zeta = 0

  bool q_unit() const { return log_q == 0.0; }
  /// ln |zeta q^w|^2 for a coordinate w (integer or half-odd).
  double log_weight(double w) const { return 2.0 * (log_zeta + w * log_q); }
  /// |zeta q^w|^2
  double weight(double w) const;
};

inline constexpr double kEpsilonMargin = 1e-9;

DerivedConstants derive_constants(const ModelParams& params);

/// f(u) = sinh^2(s/2) / (cosh(s(u-1/2)) cosh(s(u+1/2))), s = ln|q|.
double f_coeff(double u, const DerivedConstants& c);

/// Model plus its derived scalars, the bundle every evaluator takes.
struct Model {
  ModelParams params;
  DerivedConstants derived;

  explicit Model(const ModelParams& p) : params(p), derived(derive_constants(p)) {}
};

/// Flat key=value parameter file. Unknown keys are rejected.
struct ParameterRecord {
  int L = 5;
  ModelParams params;
};

ParameterRecord parse_parameter_text(const std::string& text, ParameterRecord base = {});
ParameterRecord load_parameter_file(const std::string& path, ParameterRecord base = {});

/// ln(1 + e^a) without overflow.
inline double softplus(double a) {
  if (a > 0) return a + std::log1p(std::exp(-a));
  return std::log1p(std::exp(a));
}

}  // namespace flatband
