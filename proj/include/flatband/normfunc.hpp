// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// Normalization function A(x,y;zeta) of the product state and its rescaled
// form B(x,y,z). All kernels are templated on the floating type so that a
// long double run can shadow the default double path.

#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <ostream>
#include <string>
#include <limits>
#include <type_traits>
#include <vector>

#include "flatband/error.hpp"
#include "flatband/model.hpp"

namespace flatband {

template <class T>
using nondeduced_t = std::type_identity_t<T>;

/// Additive shift of one trailing recursion coefficient. Used only to
/// check that the verification suites notice a corrupted kernel.
struct Perturbation {
  int site = INT_MIN;
  double delta = 0.0;
};

/// |q|^{1/2} - |q|^{-1/2}, squared.
inline double split_gap2(const DerivedConstants& c) {
  const double g = 2.0 * std::sinh(0.5 * std::abs(c.log_q));
  return g * g;
}

template <class Scalar>
Scalar f_coeff_t(Scalar u, Scalar s) {
  using std::cosh;
  using std::sinh;
  if (s == 0 || std::isinf(u)) return Scalar(0);
  const Scalar h = sinh(s / 2);
  return (h / cosh(s * (u - Scalar(0.5)))) * (h / cosh(s * (u + Scalar(0.5))));
}

/// Coefficients of the three-term recursion for B at fixed z.
template <class Scalar>
struct Recurrence {
  Scalar r2{};
  Scalar lead{};  // (1 + r^2) / r^2
  Scalar s{};
  Scalar z{};
  Perturbation fault{};

  Recurrence(const DerivedConstants& c, Scalar z_, Perturbation p = {})
      : r2(Scalar(c.r) * Scalar(c.r)), lead((1 + r2) / r2), s(Scalar(c.log_q)), z(z_), fault(p) {
    if (std::isnan(static_cast<double>(z_))) throw InvalidArgument("z must be a number");
  }

  Scalar f(Scalar u) const { return f_coeff_t<Scalar>(u, s); }

  /// Trailing coefficient in the step that produces B(., y).
  Scalar forward(int y) const {
    Scalar b = (1 - f(Scalar(y) - z - Scalar(0.5))) / r2;
    if (y == fault.site) b += Scalar(fault.delta);
    return b;
  }
  /// Trailing coefficient in the step that produces B(x, .); equals forward(x + 1).
  Scalar backward(int x) const { return forward(x + 1); }
};

/// A(x,y) = exp(log_prefactor) * b_value.
template <class Scalar = double>
struct LogNormValue {
  double log_prefactor = 0.0;
  Scalar b_value{};

  double log_value() const { return log_prefactor + std::log(static_cast<double>(b_value)); }
};

/// ln r(1 + |q|^{2(w-z)}), or ln r(1 + |zeta|^2) when |q| = 1.
inline double log_rho(int w, double z, const DerivedConstants& c) {
  if (c.q_unit()) return std::log(c.r) + softplus(2.0 * c.log_zeta);
  return std::log(c.r) + softplus(2.0 * (w - z) * c.log_q);
}

/// B along one free end with the other end held fixed.
///
/// Forward tables fix the left end x0 and hold y = x0-2 ... y_max.
/// Backward tables fix the right end y0 and hold x = y0+2 down to x_min.
/// In both cases values[0] = 0 and values[1] = 1.
template <class Scalar = double>
struct IntervalTable {
  bool left_varies = false;
  int anchor = 0;
  int far_end = 0;
  Scalar z{};
  DerivedConstants constants;
  std::vector<Scalar> values;

  int x0() const { return left_varies ? far_end : anchor; }
  int y_max() const { return left_varies ? anchor : far_end; }

  bool covers(int k) const {
    return left_varies ? (k >= far_end && k <= anchor + 2) : (k >= anchor - 2 && k <= far_end);
  }
  std::size_t index(int k) const {
    if (!covers(k)) throw InvalidArgument("index outside interval table");
    return left_varies ? static_cast<std::size_t>(anchor + 2 - k) : static_cast<std::size_t>(k - anchor + 2);
  }
  /// B(anchor, k) for forward tables, B(k, anchor) for backward ones.
  Scalar at(int k) const { return values[index(k)]; }

  double log_prefactor(int k) const {
    const int lo = left_varies ? k : anchor;
    const int hi = left_varies ? anchor : k;
    double acc = 0.0;
    for (int w = lo; w <= hi; ++w) acc += log_rho(w, static_cast<double>(z), constants);
    return acc;
  }
  LogNormValue<Scalar> log_norm(int k) const { return {log_prefactor(k), at(k)}; }
};

namespace detail {

inline void require_noninteger_q(const DerivedConstants& c, const char* who) {
  if (c.q_unit()) throw InvalidArgument(std::string(who) + ": |q| = 1 uses the closed form");
}

}  // namespace detail

/// Exact boundary values A(x,x), A(x,x+1), A(x-1,x).
struct BoundaryValues {
  double a_xx;
  double a_x_xp1;
  double a_xm1_x;
};

BoundaryValues boundary_A(int x, const DerivedConstants& c);

/// |q| = 1 closed form, in log-domain.
LogNormValue<double> a_closed_qunit(int x, int y, const DerivedConstants& c);

template <class Scalar = double>
IntervalTable<Scalar> b_forward(int x0, int y_max, nondeduced_t<Scalar> z, const DerivedConstants& c,
                                Perturbation fault = {}) {
  detail::require_noninteger_q(c, "b_forward");
  if (y_max < x0 - 2) throw InvalidArgument("b_forward: y_max < x0 - 2");
  const Recurrence<Scalar> rec(c, z, fault);
  IntervalTable<Scalar> t{false, x0, y_max, z, c, {}};
  t.values.reserve(static_cast<std::size_t>(y_max - x0 + 3));
  t.values.push_back(0);
  t.values.push_back(1);
  for (int y = x0; y <= y_max; ++y) {
    const std::size_t n = t.values.size();
    t.values.push_back(rec.lead * t.values[n - 1] - rec.forward(y) * t.values[n - 2]);
  }
  t.values.resize(static_cast<std::size_t>(y_max - x0 + 3));
  return t;
}

template <class Scalar = double>
IntervalTable<Scalar> b_backward(int x_min, int y0, nondeduced_t<Scalar> z, const DerivedConstants& c,
                                 Perturbation fault = {}) {
  detail::require_noninteger_q(c, "b_backward");
  if (x_min > y0 + 2) throw InvalidArgument("b_backward: x_min > y0 + 2");
  const Recurrence<Scalar> rec(c, z, fault);
  IntervalTable<Scalar> t{true, y0, x_min, z, c, {}};
  t.values.push_back(0);
  t.values.push_back(1);
  for (int x = y0; x >= x_min; --x) {
    const std::size_t n = t.values.size();
    t.values.push_back(rec.lead * t.values[n - 1] - rec.backward(x) * t.values[n - 2]);
  }
  t.values.resize(static_cast<std::size_t>(y0 - x_min + 3));
  return t;
}

/// B(x,y) with formal boundary values; one-shot evaluation.
template <class Scalar = double>
Scalar b_value(int x, int y, nondeduced_t<Scalar> z, const DerivedConstants& c, Perturbation fault = {}) {
  if (y < x - 2) throw InvalidArgument("b_value: y < x - 2");
  if (c.q_unit()) {
    const Scalar r2 = Scalar(c.r) * Scalar(c.r);
    return (1 - std::pow(r2, -Scalar(y - x + 2))) / (1 - 1 / r2);
  }
  return b_forward<Scalar>(x, y, z, c, fault).at(y);
}

/// B(x,y) expanded around an interior point w.
template <class Scalar = double>
Scalar b_split(int x, int w, int y, nondeduced_t<Scalar> z, const DerivedConstants& c) {
  if (!(x <= w && w <= y)) throw InvalidArgument("b_split requires x <= w <= y");
  detail::require_noninteger_q(c, "b_split");
  const Recurrence<Scalar> rec(c, z);
  const auto left = b_forward<Scalar>(x, w - 1, z, c);
  const auto right = b_backward<Scalar>(w + 1, y, z, c);
  return -rec.forward(w) * left.at(w - 2) * right.at(w + 1) + rec.lead * left.at(w - 1) * right.at(w + 1) -
         rec.forward(w + 1) * left.at(w - 1) * right.at(w + 2);
}

/// R_+ = 1 + gamma(g), R_- = r^{-2} - gamma(g).
template <class Scalar = double>
struct DRoots {
  Scalar gamma, r_plus, r_minus;
};

template <class Scalar = double>
DRoots<Scalar> d_roots(nondeduced_t<Scalar> g, const DerivedConstants& c) {
  if (!(g >= 0 && g < 1)) throw InvalidArgument("comparison coefficient g must lie in [0, 1)");
  using std::sqrt;
  const Scalar eps = Scalar(c.epsilon);
  const Scalar r = (eps + sqrt(eps * eps - 4)) / 2;
  const Scalar a = sqrt(eps * eps - 4 + 4 * g);
  const Scalar b = sqrt(eps * eps - 4);
  const Scalar gamma = 2 * g / (r * (a + b));
  return {gamma, 1 + gamma, 1 / (r * r) - gamma};
}

/// D for window length n = y - x + 2.
template <class Scalar = double>
Scalar d_closed(int n, nondeduced_t<Scalar> g, const DerivedConstants& c) {
  if (n < 0) throw InvalidArgument("d_closed: n must be nonnegative");
  const auto R = d_roots<Scalar>(g, c);
  using std::pow;
  return (pow(R.r_plus, Scalar(n)) - pow(R.r_minus, Scalar(n))) / (R.r_plus - R.r_minus);
}

/// C(x0, y) for y = x0-2 ... y_max, same layout as a forward IntervalTable.
template <class Scalar = double>
std::vector<Scalar> c_recursive(int x0, int y_max, nondeduced_t<Scalar> z, nondeduced_t<Scalar> g,
                                const DerivedConstants& c) {
  detail::require_noninteger_q(c, "c_recursive");
  if (y_max < x0 - 2) throw InvalidArgument("c_recursive: y_max < x0 - 2");
  const Recurrence<Scalar> rec(c, z);
  for (int w = x0; w <= y_max - 1; ++w)
    if (rec.f(Scalar(w) + Scalar(0.5) - z) > g)
      throw PreconditionViolation("c_recursive: g is below max f on the window");
  std::vector<Scalar> out{Scalar(0), Scalar(1)};
  for (int y = x0; y <= y_max; ++y) {
    const std::size_t n = out.size();
    out.push_back(rec.lead * out[n - 1] - out[n - 2] / rec.r2 +
                  rec.f(Scalar(y) - Scalar(0.5) - z) / rec.r2 * d_closed<Scalar>(y - x0, g, c));
  }
  return out;
}

/// Geometric envelope for the successive differences B(x,y) - B(x,y-1).
struct ConvergenceEnvelope {
  double beta = 0;
  double K1 = 0;  // includes the R_+^{-x} factor; valid for the given x only
  double K2 = 0;
  double K3 = 0;
  double g = 0;
  int x = 0;
  double z = 0;
  double r = 0;
  double q = 0;  // max(|q|, 1/|q|)
  double log_K1_beta_x = 0;  // ln(K1 beta^x)
  double log_beta = 0;

  /// Bound on B(x,y) - B(x,y-1) for y >= x.
  double step_bound(int y) const;
  /// Bound on the sum of step_bound over all y' > y.
  double tail_bound(int y) const;
};

ConvergenceEnvelope convergence_envelope(int x, double z, const DerivedConstants& c);
ConvergenceEnvelope convergence_envelope(int x, double z, double g, const DerivedConstants& c);

enum class LimitDirection { right, left, both };

template <class Scalar = double>
struct LimitResult {
  Scalar value{};
  double error_bound = 0;
  int steps = 0;
};

namespace detail {

int limit_iteration_cap(double tol, const ConvergenceEnvelope& env);

template <class Scalar>
LimitResult<Scalar> right_limit(int x, Scalar z, double tol, const DerivedConstants& c) {
  const auto env = convergence_envelope(x, static_cast<double>(z), c);
  const int cap = limit_iteration_cap(tol, env);
  const Recurrence<Scalar> rec(c, z);
  Scalar prev2 = 0, prev = 1;
  for (int k = 0; k < cap; ++k) {
    const int y = x + k;
    const Scalar cur = rec.lead * prev - rec.forward(y) * prev2;
    const double step = static_cast<double>(cur - prev);
    prev2 = prev;
    prev = cur;
    const double tail = env.tail_bound(y);
    if (k > 0 && step < tol * static_cast<double>(cur) && tail < tol * static_cast<double>(cur))
      return {cur, tail, k + 1};
  }
  throw NumericalFailure("b_limit: no convergence within the iteration cap");
}

}  // namespace detail

/// B(x, +inf, z), B(-inf, x, z), or B(-inf, +inf, z) split at x.
template <class Scalar = double>
LimitResult<Scalar> b_limit(int x, nondeduced_t<Scalar> z, LimitDirection dir, double tol,
                            const DerivedConstants& c) {
  detail::require_noninteger_q(c, "b_limit");
  if (!(tol > 0)) throw InvalidArgument("b_limit: tol must be positive");
  switch (dir) {
    case LimitDirection::right:
      return detail::right_limit<Scalar>(x, z, tol, c);
    case LimitDirection::left:
      return detail::right_limit<Scalar>(-x, -z, tol, c);
    case LimitDirection::both: {
      const Recurrence<Scalar> rec(c, z);
      const int w = x;
      const auto l2 = detail::right_limit<Scalar>(-(w - 2), -z, tol, c);
      const auto l1 = detail::right_limit<Scalar>(-(w - 1), -z, tol, c);
      const auto r1 = detail::right_limit<Scalar>(w + 1, z, tol, c);
      const auto r2 = detail::right_limit<Scalar>(w + 2, z, tol, c);
      const Scalar a = rec.forward(w), b = rec.lead, d = rec.forward(w + 1);
      const Scalar v = -a * l2.value * r1.value + b * l1.value * r1.value - d * l1.value * r2.value;
      auto prod_err = [](const auto& u, const auto& t) {
        return static_cast<double>(u.value) * t.error_bound + static_cast<double>(t.value) * u.error_bound +
               u.error_bound * t.error_bound;
      };
      const double err = static_cast<double>(a) * prod_err(l2, r1) + static_cast<double>(b) * prod_err(l1, r1) +
                         static_cast<double>(d) * prod_err(l1, r2);
      return {v, err, l2.steps + l1.steps + r1.steps + r2.steps};
    }
  }
  throw InvalidArgument("b_limit: bad direction");
}

/// Ratio bounds for B(x,y)/B(x,y+1) and B(x,y)/B(x-1,y); the upper bounds are 1.
struct RatioBounds {
  double right_lower = 0;
  double left_lower = 0;
  double upper = 1.0;
  double G_plus = 0;
  double G_minus = 0;
};

/// G~+ and G~- from the three-case closed forms.
double g_tilde_plus(int x, int y, double z, const DerivedConstants& c);
double g_tilde_minus(int x, int y, double z, const DerivedConstants& c);
/// Same quantities summed term by term from the envelope of f.
double g_tilde_plus_sum(int x, int y, double z, const DerivedConstants& c);
double g_tilde_minus_sum(int x, int y, double z, const DerivedConstants& c);

RatioBounds ratio_bounds(int x, int y, double z, const DerivedConstants& c);

/// Certified C p^{-2(u-w)} bound on |B(y+1,u-1)B(-inf,inf) - B(-inf,u-1)B(y+1,inf)|.
double truncated_norm_bound(int y, int u, double z, double w, const DerivedConstants& c);

/// sign * exp(log_abs); zero has sign 0.
struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// B(a,k)B(lo,hi) - B(a,hi)B(lo,k) without cancellation. Requires
/// lo <= a-1 and a-1 <= k <= hi. Works for |q| = 1 too.
SignedLog cross_difference(int a, int k, int lo, int hi, double z, const DerivedConstants& c);

/// CSV with columns y, B, log_prefactor (x for backward tables).
template <class Scalar>
void write_table_csv(std::ostream& os, const IntervalTable<Scalar>& t) {
  const auto old = os.precision(17);
  os << (t.left_varies ? "x" : "y") << ",B,log_prefactor\n";
  const int lo = t.left_varies ? t.far_end : t.anchor - 2;
  const int hi = t.left_varies ? t.anchor + 2 : t.far_end;
  for (int k = lo; k <= hi; ++k)
    os << k << ',' << static_cast<double>(t.at(k)) << ',' << t.log_prefactor(k) << '\n';
  os.precision(old);
}

}  // namespace flatband
