// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/normfunc.hpp"

#include <cmath>
#include <vector>

namespace flatband {

BoundaryValues boundary_A(int x, const DerivedConstants& c) {
  auto one_plus = [&](double w) { return 1.0 + c.weight(w); };
  const double e = c.epsilon;
  BoundaryValues b{};
  b.a_xx = e * one_plus(x);
  const double mid_r = one_plus(x + 0.5);
  const double mid_l = one_plus(x - 0.5);
  b.a_x_xp1 = e * e * one_plus(x) * one_plus(x + 1) - mid_r * mid_r;
  b.a_xm1_x = e * e * one_plus(x - 1) * one_plus(x) - mid_l * mid_l;
  return b;
}

LogNormValue<double> a_closed_qunit(int x, int y, const DerivedConstants& c) {
  if (!c.q_unit()) throw InvalidArgument("a_closed_qunit requires |q| = 1");
  if (y < x - 2) throw InvalidArgument("a_closed_qunit: y < x - 2");
  const int n = y - x + 1;
  const double log_r2 = 2.0 * std::log(c.r);
  LogNormValue<double> out;
  out.log_prefactor = n * (std::log(c.r) + softplus(2.0 * c.log_zeta));
  out.b_value = std::expm1(-log_r2 * (n + 1)) / std::expm1(-log_r2);
  return out;
}

namespace {

/// (a^{n+1} - b^{n+1}) / (a - b) for a, b > 0 given as logs.
double log_two_power_sum(double log_a, double log_b, int n) {
  const double hi = std::max(log_a, log_b);
  const double d = std::min(log_a, log_b) - hi;  // <= 0
  double ratio;
  if (d == 0.0 || std::isinf(d))
    ratio = std::isinf(d) ? 1.0 : n + 1.0;
  else
    ratio = std::expm1((n + 1) * d) / std::expm1(d);
  return n * hi + std::log(ratio);
}

}  // namespace

ConvergenceEnvelope convergence_envelope(int x, double z, const DerivedConstants& c) {
  const double t = std::tanh(0.5 * std::abs(c.log_q));
  return convergence_envelope(x, z, t * t, c);
}

ConvergenceEnvelope convergence_envelope(int x, double z, double g, const DerivedConstants& c) {
  detail::require_noninteger_q(c, "convergence_envelope");
  const auto R = d_roots<double>(g, c);
  ConvergenceEnvelope env;
  env.g = g;
  env.x = x;
  env.z = z;
  env.r = c.r;
  const double lq = std::abs(c.log_q);
  env.q = std::exp(lq);
  env.beta = R.r_plus / (env.q * env.q);
  env.log_beta = std::log(R.r_plus) - 2.0 * lq;
  const double c0 = split_gap2(c) / (R.r_plus - R.r_minus);
  const double r2 = c.r * c.r;
  if (std::isinf(z)) {
    env.log_K1_beta_x = -std::numeric_limits<double>::infinity();
    env.K1 = 0;
    env.K2 = 1.0 / r2;
    env.K3 = 0;
    return env;
  }
  const double log_K1 = (2.0 * z + 1.0) * lq - std::log(r2) - x * std::log(R.r_plus) + std::log(c0);
  env.K1 = std::exp(log_K1);
  env.log_K1_beta_x = log_K1 + x * env.log_beta;
  const double q2 = env.q * env.q;
  env.K2 = (1.0 + std::pow(env.q, 2.0 * (z - x) + 3.0) / (q2 - r2 * R.r_plus) * c0) / r2;
  env.K3 = R.r_plus * std::pow(env.q, 2.0 * (z - x) + 1.0) / (r2 * R.r_plus - q2) * c0;
  return env;
}

double ConvergenceEnvelope::step_bound(int y) const {
  const int n = y - x;
  const double log_r2 = 2.0 * std::log(r);
  const double homogeneous = std::exp(-log_r2 * (n + 1));
  if (std::isinf(log_K1_beta_x)) return homogeneous;
  return homogeneous + std::exp(log_K1_beta_x + log_two_power_sum(log_beta, -log_r2, n));
}

double ConvergenceEnvelope::tail_bound(int y) const {
  const double r2 = r * r;
  double source = 0.0;
  if (!std::isinf(log_K1_beta_x))
    source = std::exp(log_K1_beta_x + (y - x + 1) * log_beta) / (1.0 - beta);
  return (step_bound(y) / r2 + source) / (1.0 - 1.0 / r2);
}

namespace detail {

int limit_iteration_cap(double tol, const ConvergenceEnvelope& env) {
  const double m = std::max(-2.0 * std::log(env.r), env.log_beta);  // log of the slower rate
  const double base = std::ceil(std::log(tol) / m);
  const double offset = std::isinf(env.log_K1_beta_x) ? 0.0 : std::ceil(std::max(0.0, env.log_K1_beta_x) / -m);
  const double cap = 10.0 * (base + offset) + 10.0;
  return cap > 5e7 ? 50000000 : static_cast<int>(cap);
}

}  // namespace detail

namespace {

struct GContext {
  double Q, r, r2, gap2;
  explicit GContext(const DerivedConstants& c)
      : Q(std::exp(std::abs(c.log_q))), r(c.r), r2(c.r * c.r), gap2(split_gap2(c)) {}
  double qp(double e) const { return std::pow(Q, e); }
  double rp(double e) const { return std::pow(r, e); }
  bool resonant() const { return std::abs(Q * Q - r2) < 1e-6 * r2; }
};

double env_f(double u, const GContext& g) { return g.gap2 * g.qp(-2.0 * std::abs(u)); }

}  // namespace

double g_tilde_plus_sum(int x, int y, double z, const DerivedConstants& c) {
  const GContext g(c);
  double acc = g.rp(-2.0 * (y - x + 1)) / (1.0 + g.r2);
  if (g.gap2 == 0.0 || std::isinf(z)) return acc;
  for (int j = 0; j <= y - x; ++j) acc += env_f(y + 0.5 - j - z, g) * g.rp(-2.0 * (j + 1));
  return acc;
}

double g_tilde_minus_sum(int x, int y, double z, const DerivedConstants& c) {
  const GContext g(c);
  double acc = g.rp(-2.0 * (y - x + 1)) / (1.0 + g.r2);
  if (g.gap2 == 0.0 || std::isinf(z)) return acc;
  for (int j = 0; j <= y - x; ++j) acc += env_f(x - 0.5 + j - z, g) * g.rp(-2.0 * (j + 1));
  return acc;
}

double g_tilde_plus(int x, int y, double z, const DerivedConstants& c) {
  const GContext g(c);
  const int n1 = y - x + 1;
  const double base = g.rp(-2.0 * n1) / (1.0 + g.r2);
  if (g.gap2 == 0.0 || std::isinf(z)) return base;
  if (g.resonant()) return g_tilde_plus_sum(x, y, z, c);
  const double Q2 = g.Q * g.Q;
  double body;
  if (x >= z - 0.5) {
    body = g.qp(-2.0 * (x - z - 0.5)) * (g.rp(-2.0 * n1) - g.qp(-2.0 * n1)) / (Q2 - g.r2);
  } else if (y <= z - 0.5) {
    body = g.qp(-2.0 * (z - y - 1.5)) * (1.0 - g.qp(-2.0 * n1) * g.rp(-2.0 * n1)) / (Q2 * g.r2 - 1.0);
  } else {
    const double zp = std::ceil(z - 0.5);
    body = -g.rp(-2.0 * n1) * g.qp(-2.0 * (z - x - 0.5)) / (g.r2 * Q2 - 1.0) +
           g.qp(-2.0 * (y - z + 0.5)) / (g.r2 - Q2) +
           g.Q * g.rp(-2.0 * (y - zp + 1.0)) *
               (g.qp(2.0 * (zp - z)) / (g.r2 * Q2 - 1.0) + g.qp(2.0 * (z - zp)) / (Q2 - g.r2));
  }
  return base + g.gap2 * body;
}

double g_tilde_minus(int x, int y, double z, const DerivedConstants& c) {
  const GContext g(c);
  const int n1 = y - x + 1;
  const double base = g.rp(-2.0 * n1) / (1.0 + g.r2);
  if (g.gap2 == 0.0 || std::isinf(z)) return base;
  if (g.resonant()) return g_tilde_minus_sum(x, y, z, c);
  const double Q2 = g.Q * g.Q;
  double body;
  if (x >= z + 0.5) {
    body = g.qp(-2.0 * (x - z - 1.5)) * (1.0 - g.qp(-2.0 * n1) * g.rp(-2.0 * n1)) / (Q2 * g.r2 - 1.0);
  } else if (y <= z + 0.5) {
    body = g.qp(-2.0 * (z - y - 0.5)) * (g.rp(-2.0 * n1) - g.qp(-2.0 * n1)) / (Q2 - g.r2);
  } else {
    const double zp = std::ceil(z - 0.5);
    body = -g.rp(-2.0 * n1) * g.qp(-2.0 * (y - z - 0.5)) / (g.r2 * Q2 - 1.0) +
           g.qp(-2.0 * (z - x + 0.5)) / (g.r2 - Q2) +
           g.Q * g.rp(-2.0 * (zp - x + 1.0)) *
               (g.qp(2.0 * (z - zp)) / (g.r2 * Q2 - 1.0) + g.qp(2.0 * (zp - z)) / (Q2 - g.r2));
  }
  return base + g.gap2 * body;
}

RatioBounds ratio_bounds(int x, int y, double z, const DerivedConstants& c) {
  if (!(x < y)) throw InvalidArgument("ratio_bounds requires x < y");
  const double cap = 1.0 / (c.r * c.r + 1.0);
  RatioBounds out;
  out.G_plus = std::min(cap, g_tilde_plus(x, y, z, c));
  out.G_minus = std::min(cap, g_tilde_minus(x, y, z, c));
  out.right_lower = 1.0 - out.G_plus;
  out.left_lower = 1.0 - out.G_minus;
  return out;
}

namespace {

/// G_+ including the one-site window where only the universal floor applies.
double g_plus_any(int x, int v, double z, const DerivedConstants& c) {
  const double cap = 1.0 / (c.r * c.r + 1.0);
  if (v <= x) return cap;
  return std::min(cap, g_tilde_plus(x, v, z, c));
}

}  // namespace

double truncated_norm_bound(int y, int u, double z, double w, const DerivedConstants& c) {
  detail::require_noninteger_q(c, "truncated_norm_bound");
  if (!(u > w)) throw InvalidArgument("truncated_norm_bound requires u > w");
  const int u_first = static_cast<int>(std::floor(w)) + 1;
  const int u_last = std::max(u_first + 200, u);
  const double log_p = std::log(c.p);

  // Suffix sums of -log(1 - G) for both products, from v = u_first - 1 on.
  const int v0 = u_first - 1;
  std::vector<double> up, lo;
  for (int v = v0;; ++v) {
    const double gu = g_plus_any(y + 1, v, z, c);
    const double gl = g_plus_any(v - 4000, v, z, c);
    up.push_back(-std::log1p(-gu));
    lo.push_back(-std::log1p(-gl));
    if ((v >= u_last && gu < 1e-20 && gl < 1e-20) || up.size() > 400000) break;
  }
  for (std::size_t i = up.size() - 1; i-- > 0;) {
    up[i] += up[i + 1];
    lo[i] += lo[i + 1];
  }

  const double b_inf = static_cast<double>(b_limit<double>(y + 1, z, LimitDirection::both, 1e-15, c).value);
  const auto tab = b_forward<double>(y + 1, u_last - 1, z, c);
  double log_C = -std::numeric_limits<double>::infinity();
  for (int uu = u_first; uu <= u_last; ++uu) {
    const std::size_t i = static_cast<std::size_t>(uu - 1 - v0);
    const double spread = std::max(std::expm1(up[i]), -std::expm1(-lo[i]));
    const double log_cert = std::log(b_inf) + std::log(tab.at(uu - 1)) + std::log(spread);
    log_C = std::max(log_C, log_cert + 2.0 * (uu - w) * log_p);
  }
  return std::exp(log_C - 2.0 * (u - w) * log_p);
}

SignedLog cross_difference(int a, int k, int lo, int hi, double z, const DerivedConstants& c) {
  if (!(lo <= a - 1 && a - 1 <= k && k <= hi))
    throw InvalidArgument("cross_difference requires lo <= a-1 <= k <= hi");
  if (k == hi) return {};
  const double zz = c.q_unit() ? 0.0 : z;
  const Recurrence<double> rec(c, zz);

  double log_w = std::log(b_value<double>(lo, a - 2, zz, c));
  for (int j = a; j <= hi; ++j) log_w += std::log(rec.forward(j));

  // delta(kk) for kk = hi, hi-1, ... with delta(hi) = 0, delta(hi-1) = 1.
  double d_hi = 0.0, d_lo = 1.0, log_scale = 0.0;
  for (int kk = hi; kk >= k + 2; --kk) {
    const double next = (rec.lead * d_lo - d_hi) / rec.forward(kk);
    d_hi = d_lo;
    d_lo = next;
    const double m = std::abs(d_lo);
    if (m > 1e150) {
      d_lo /= m;
      d_hi /= m;
      log_scale += std::log(m);
    }
  }
  if (d_lo == 0.0) return {};
  SignedLog out;
  out.sign = d_lo > 0 ? -1 : 1;
  out.log_abs = log_w + log_scale + std::log(std::abs(d_lo));
  return out;
}

}  // namespace flatband
