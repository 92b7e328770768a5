// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flatband/error.hpp"

namespace flatband {

GroundState::GroundState(const ModelParams& p, int l) : model_(p), l_(l), z_(0.0), total_(0.0) {
  if (l < 1) throw InvalidArgument("lattice half-length must be at least 1");
  const auto& c = model_.derived;
  if (c.q_unit()) {
    for (int k = -l - 2; k <= l; ++k) left_.push_back(b_value<double>(-l, k, 0.0, c));
    for (int k = -l; k <= l + 2; ++k) right_.push_back(b_value<double>(k, l, 0.0, c));
  } else {
    z_ = *c.z;
    left_ = b_forward<double>(-l, l, z_, c).values;
    const auto back = b_backward<double>(-l, l, z_, c);
    right_.assign(back.values.rbegin(), back.values.rend());
  }
  total_ = left_.back();
}

GroundState GroundState::limit(const ModelParams& p, int lo, int hi, double tol) {
  return GroundState(p, limit_half_length(p, lo, hi, tol));
}

double GroundState::b_left(int k) const {
  if (k < -l_ - 2 || k > l_) throw InvalidArgument("b_left index out of range");
  return left_[static_cast<std::size_t>(k + l_ + 2)];
}

double GroundState::b_right(int k) const {
  if (k < -l_ || k > l_ + 2) throw InvalidArgument("b_right index out of range");
  return right_[static_cast<std::size_t>(k + l_)];
}

double GroundState::b(int a, int bb) const { return b_value<double>(a, bb, z_, model_.derived); }

double GroundState::log1p_weight(double w) const { return softplus(model_.derived.log_weight(w)); }

double GroundState::log_rho(int w) const { return std::log(model_.derived.r) + log1p_weight(w); }

void GroundState::require_site(Site x) const {
  if (!contains(x)) throw InvalidArgument("site " + to_string(x) + " outside the lattice");
}

void GroundState::require_integer(Site x, const char* who) {
  if (!x.on_integer())
    throw UnsupportedAnalyticForm(std::string(who) +
                                  ": no closed form at half-odd sites; use the exact-diagonalization oracle");
}

double GroundState::density(Site x) const {
  require_site(x);
  const auto& c = model_.derived;
  const double lam2 = model_.params.lambda * model_.params.lambda;
  if (x.on_integer()) {
    const int k = x.half_units / 2;
    return lam2 / c.r * b_left(k - 1) * b_right(k + 1) / total_;
  }
  const int a = (x.half_units - 1) / 2;
  const int bb = a + 1;
  const double lx = log1p_weight(x.coordinate());
  const double s = c.log_q;
  const double t1 = std::exp(lx - 0.5 * s - log_rho(a)) * b_left(a - 1) * b_right(a + 1);
  const double t2 = std::exp(lx + 0.5 * s - log_rho(bb)) * b_left(a) * b_right(bb + 1);
  const double t3 = 2.0 * std::exp(2.0 * lx - log_rho(a) - log_rho(bb)) * b_left(a - 1) * b_right(bb + 1);
  return (t1 + t2 - t3) / total_;
}

double GroundState::spin(Site x, int j) const {
  if (j < 1 || j > 3) throw InvalidArgument("spin component must be 1, 2 or 3");
  const double half_n = 0.5 * density(x);
  const auto& p = model_.params;
  if (p.zeta_abs == 0.0) return j == 3 ? half_n : 0.0;
  const double lw = 0.5 * model_.derived.log_weight(x.coordinate());  // ln|zeta q^x|
  const double phase = p.zeta_phase + p.theta * x.coordinate();
  switch (j) {
    case 1:
      return half_n * std::cos(phase) / std::cosh(lw);
    case 2:
      return half_n * std::sin(phase) / std::cosh(lw);
    default:
      return -half_n * std::tanh(lw);
  }
}

cplx GroundState::electron(Site x, Spin s, Site y, Spin t) const {
  require_integer(x, "electron two-point");
  require_integer(y, "electron two-point");
  require_site(x);
  require_site(y);
  if (x > y) return std::conj(electron(y, t, x, s));
  const auto& p = model_.params;
  const auto& c = model_.derived;
  const int xi = x.half_units / 2, yi = y.half_units / 2;
  auto log_eta = [&](Spin sp, int w) { return sp == Spin::up ? 0.0 : 0.5 * c.log_weight(w); };
  auto arg_eta = [&](Spin sp, int w) { return sp == Spin::up ? 0.0 : p.zeta_phase + p.theta * w; };
  const double bl = b_left(xi - 1), br = b_right(yi + 1);
  if (bl == 0.0 || br == 0.0 || p.lambda == 0.0) return 0.0;
  double log_mag = 2.0 * std::log(p.lambda) + log_eta(s, xi) + log_eta(t, yi) + std::log(bl) + std::log(br) -
                   std::log(total_);
  for (int w = xi; w < yi; ++w) log_mag += log1p_weight(w + 0.5);
  for (int w = xi; w <= yi; ++w) log_mag -= log_rho(w);
  if (std::isinf(log_mag) && log_mag < 0) return 0.0;
  const int sep = yi - xi;
  const double phase = arg_eta(t, yi) - arg_eta(s, xi) + std::numbers::pi * sep - 0.5 * p.theta * sep;
  return std::polar(std::exp(log_mag), phase);
}

double GroundState::density_pair(Site x, Site y) const {
  require_integer(x, "density two-point");
  require_integer(y, "density two-point");
  require_site(x);
  require_site(y);
  if (x == y) throw InvalidArgument("density two-point needs distinct sites");
  if (x > y) std::swap(x, y);
  const int xi = x.half_units / 2, yi = y.half_units / 2;
  const double lam2 = model_.params.lambda * model_.params.lambda;
  const double r = model_.derived.r;
  return lam2 * lam2 / (r * r) * b_left(xi - 1) * b(xi + 1, yi - 1) * b_right(yi + 1) / total_;
}

double GroundState::spin_pair(Site x, Site y, int j, int k) const {
  const double nn = density_pair(x, y);
  return spin(x, j) * spin(y, k) * nn / (density(x) * density(y));
}

double GroundState::truncated_density(Site x, Site y) const {
  require_integer(x, "truncated density");
  require_integer(y, "truncated density");
  require_site(x);
  require_site(y);
  if (x == y) throw InvalidArgument("truncated density needs distinct sites");
  if (x > y) std::swap(x, y);
  const int xi = x.half_units / 2, yi = y.half_units / 2;
  const auto d = cross_difference(xi + 1, yi - 1, -l_, l_, z_, model_.derived);
  if (d.sign == 0) return 0.0;
  const double lam = model_.params.lambda;
  const double log_abs = 4.0 * std::log(lam) - 2.0 * std::log(model_.derived.r) + std::log(b_left(xi - 1)) +
                         std::log(b_right(yi + 1)) - 2.0 * std::log(total_) + d.log_abs;
  return d.sign * std::exp(log_abs);
}

double GroundState::truncated_spin33(Site x, Site y) const {
  auto s3_factor = [&](Site w) {
    if (model_.params.zeta_abs == 0.0) return 0.5;
    return -0.5 * std::tanh(0.5 * model_.derived.log_weight(w.coordinate()));
  };
  return s3_factor(x) * s3_factor(y) * truncated_density(x, y);
}

int limit_half_length(const ModelParams& p, int lo, int hi, double tol) {
  if (lo > hi) throw InvalidArgument("empty window");
  if (!(tol > 0)) throw InvalidArgument("tol must be positive");
  const DerivedConstants c = derive_constants(p);
  const int reach = std::max(std::abs(lo), std::abs(hi)) + 2;
  if (c.q_unit()) {
    const double r2 = c.r * c.r;
    const int n = static_cast<int>(std::ceil(std::log(tol * (1.0 - 1.0 / r2)) / -std::log(r2)));
    return reach + std::max(n, 1);
  }
  const double z = *c.z;
  auto needed = [&](int x, double zz) {
    const auto env = convergence_envelope(x, zz, c);
    const int cap = detail::limit_iteration_cap(tol, env);
    for (int y = x; y < x + cap; ++y)
      if (env.tail_bound(y) < tol) return y;
    throw NumericalFailure("limit_half_length: envelope does not reach the tolerance");
  };
  const int l_right = needed(lo - 1, z) + 1;
  const int l_left = needed(-(hi + 1), -z) + 1;
  return std::max({reach, l_right, l_left});
}

std::string to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::density1:
      return "density1";
    case ObservableKind::spin1:
      return "spin1";
    case ObservableKind::density2:
      return "density2";
    case ObservableKind::spin2:
      return "spin2";
    case ObservableKind::electron2:
      return "electron2";
    case ObservableKind::truncated:
      return "truncated";
  }
  return "unknown";
}

std::string to_string(Source s) { return s == Source::analytic ? "analytic" : "oracle"; }

cplx ObservableProfile::at(Site x, std::optional<Site> y) const {
  for (const auto& e : entries)
    if (e.x == x && e.y == y) return e.value;
  throw InvalidArgument("profile has no entry at " + to_string(x));
}

ObservableProfile density_profile(const GroundState& g, const std::vector<Site>& sites) {
  ObservableProfile out;
  out.kind = ObservableKind::density1;
  out.params = g.model().params;
  for (Site s : sites) out.entries.push_back({s, std::nullopt, g.density(s)});
  return out;
}

ObservableProfile spin_profile(const GroundState& g, int j, const std::vector<Site>& sites) {
  ObservableProfile out;
  out.kind = ObservableKind::spin1;
  out.j = j;
  out.params = g.model().params;
  for (Site s : sites) out.entries.push_back({s, std::nullopt, g.spin(s, j)});
  return out;
}

ObservableProfile electron_profile(const GroundState& g, Spin s, Spin t,
                                   const std::vector<std::pair<Site, Site>>& pairs) {
  ObservableProfile out;
  out.kind = ObservableKind::electron2;
  out.sigma = s;
  out.tau = t;
  out.params = g.model().params;
  for (const auto& [x, y] : pairs) out.entries.push_back({x, y, g.electron(x, s, y, t)});
  return out;
}

ObservableProfile density_pair_profile(const GroundState& g, const std::vector<std::pair<Site, Site>>& pairs) {
  ObservableProfile out;
  out.kind = ObservableKind::density2;
  out.params = g.model().params;
  for (const auto& [x, y] : pairs) out.entries.push_back({x, y, g.density_pair(x, y)});
  return out;
}

ObservableProfile spin_pair_profile(const GroundState& g, int j, int k,
                                    const std::vector<std::pair<Site, Site>>& pairs) {
  ObservableProfile out;
  out.kind = ObservableKind::spin2;
  out.j = j;
  out.k = k;
  out.params = g.model().params;
  for (const auto& [x, y] : pairs) out.entries.push_back({x, y, g.spin_pair(x, y, j, k)});
  return out;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& separation_value) {
  std::vector<double> xs, ys;
  for (const auto& [d, v] : separation_value) {
    if (!(std::abs(v) > 0) || !std::isfinite(v)) continue;
    xs.push_back(d);
    ys.push_back(std::log(std::abs(v)));
  }
  if (xs.size() < 6) throw InvalidArgument("decay fit needs at least 6 usable points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("decay fit needs distinct separations");
  DecayFit f;
  const double slope = sxy / sxx;
  f.rate = -slope;
  f.intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (f.intercept + slope * xs[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  f.window_lo = *std::min_element(xs.begin(), xs.end());
  f.window_hi = *std::max_element(xs.begin(), xs.end());
  f.points = static_cast<int>(xs.size());
  return f;
}

namespace {

bool near_wall(Site s, double z) { return std::abs(s.coordinate() - z) < 2.5; }

}  // namespace

TruncatedResult truncated_correlation(const ObservableProfile& two_point, const ObservableProfile& one_point,
                                      double wall_center) {
  TruncatedResult out;
  out.profile.kind = ObservableKind::truncated;
  out.profile.params = two_point.params;
  out.profile.source = two_point.source;
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : two_point.entries) {
    if (!e.y || *e.y == e.x) continue;
    const cplx v = e.value - one_point.at(e.x) * one_point.at(*e.y);
    out.profile.entries.push_back({e.x, e.y, v});
    if (!near_wall(e.x, wall_center) && !near_wall(*e.y, wall_center))
      pts.emplace_back(std::abs(e.y->coordinate() - e.x.coordinate()), std::abs(v));
  }
  out.fit = fit_decay(pts);
  return out;
}

TruncatedResult truncated_density_scan(const GroundState& g, Site x, const std::vector<Site>& ys) {
  TruncatedResult out;
  out.profile.kind = ObservableKind::truncated;
  out.profile.params = g.model().params;
  std::vector<std::pair<double, double>> pts;
  for (Site y : ys) {
    if (y == x) continue;
    const double v = g.truncated_density(x, y);
    out.profile.entries.push_back({x, y, v});
    if (!near_wall(x, g.z()) && !near_wall(y, g.z())) pts.emplace_back(std::abs(y.coordinate() - x.coordinate()), v);
  }
  out.fit = fit_decay(pts);
  return out;
}

WallFit fit_domain_wall(const GroundState& g, int d_min, int d_max) {
  if (g.model().derived.q_unit()) throw InvalidArgument("no domain wall when |q| = 1");
  if (!std::isfinite(g.z())) throw InvalidArgument("no domain wall in the all-up or all-down state");
  std::vector<std::pair<double, double>> left, right;
  const int lo = static_cast<int>(std::floor(g.z())) - d_max, hi = static_cast<int>(std::ceil(g.z())) + d_max;
  for (int x = std::max(lo, -g.l()); x <= std::min(hi, g.l()); ++x) {
    const Site s = Site::integer(x);
    const double d = x - g.z();
    if (std::abs(d) < d_min || std::abs(d) > d_max) continue;
    (d < 0 ? left : right).emplace_back(std::abs(d), 0.5 * g.density(s) - std::abs(g.spin(s, 3)));
  }
  return {fit_decay(left), fit_decay(right)};
}

SymmetryReport symmetry_breaking_report(const ModelParams& p, int l, double phi, int u) {
  const Model m(p);
  double z0 = 0.0;
  if (m.derived.z && std::isfinite(*m.derived.z)) z0 = *m.derived.z;
  const int xc = static_cast<int>(std::lround(z0));
  const int lo = xc - 12, hi = xc + 12;

  ModelParams shifted = p;
  if (!m.derived.q_unit()) shifted.zeta_abs = p.zeta_abs * std::pow(p.q_abs, u);  // z -> z - u
  ModelParams all_up = p;
  all_up.zeta_abs = 0.0;

  auto make = [&](const ModelParams& q) {
    if (l > 0) return GroundState(q, l);
    return GroundState::limit(q, std::min(-(hi + u), lo - u), std::max(hi + u, -(lo - u)), 1e-12);
  };
  const GroundState g = make(p), gs = make(shifted), g0 = make(all_up);

  SymmetryReport rep;
  rep.site = Site::integer(std::clamp(xc + 1, -g.l(), g.l()));
  rep.phi = phi;
  rep.u = u;
  rep.s1 = g.spin(rep.site, 1);
  rep.s2 = g.spin(rep.site, 2);
  rep.s3 = g.spin(rep.site, 3);
  rep.s1_rotated = std::cos(phi) * rep.s1 - std::sin(phi) * rep.s2;
  const Site mirror = Site::half(-rep.site.half_units);
  rep.s3_reflected = g.contains(mirror) ? -g.spin(mirror, 3) : 0.0;
  const Site moved = Site::half(rep.site.half_units + 2 * u);
  rep.s3_translated = g.contains(moved) ? g.spin(moved, 3) : 0.0;

  for (int h = 2 * lo; h <= 2 * hi; ++h) {
    const Site x = Site::half(h), xu = Site::half(h + 2 * u);
    if (!g.contains(xu) || !gs.contains(x)) continue;
    rep.translation_covariance = std::max(rep.translation_covariance, std::abs(g.spin(xu, 3) - gs.spin(x, 3)));
    if (!g0.contains(x)) continue;
    rep.all_up_max_transverse =
        std::max({rep.all_up_max_transverse, std::abs(g0.spin(x, 1)), std::abs(g0.spin(x, 2))});
    rep.all_up_max_s3_gap = std::max(rep.all_up_max_s3_gap, std::abs(g0.spin(x, 3) - 0.5 * g0.density(x)));
  }
  return rep;
}

}  // namespace flatband
