// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flatband/ed_oracle.hpp"
#include "flatband/error.hpp"
#include "flatband/observables.hpp"

namespace flatband {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Accumulates one named invariant: every observation is an error that
/// must stay at or below the threshold.
class Check {
 public:
  Check(std::string name, double threshold) {
    r_.invariant = std::move(name);
    r_.threshold = threshold;
  }

  template <class Where>
  void observe(double err, Where&& where) {
    ++r_.evaluated;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    if (err > r_.worst) r_.worst = err;
    if (!(err <= r_.threshold)) {
      if (r_.violations == 0) r_.detail = where();
      ++r_.violations;
    }
  }
  void observe(double err) {
    observe(err, [] { return std::string(); });
  }
  void fail(const std::string& why) {
    ++r_.evaluated;
    if (r_.violations == 0) r_.detail = why;
    ++r_.violations;
    r_.worst = std::numeric_limits<double>::infinity();
  }

  CheckResult done() {
    r_.pass = r_.violations == 0 && r_.evaluated > 0;
    if (r_.evaluated == 0 && r_.detail.empty()) r_.detail = "nothing evaluated";
    return r_;
  }

 private:
  CheckResult r_;
};

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os.precision(6);
  os << "lambda=" << p.lambda << " |q|=" << p.q_abs << " theta=" << p.theta << " |zeta|=" << p.zeta_abs
     << " arg zeta=" << p.zeta_phase;
  return os.str();
}

ModelParams with_z(ModelParams p, double z) {
  p.zeta_abs = std::pow(p.q_abs, -z);
  return p;
}

double rel_log_error(double log_a, double log_b) { return std::abs(std::expm1(log_a - log_b)); }

OperatorSum hamiltonian_operator(const ModelParams& p, const Lattice& lat) {
  OperatorSum h;
  for (Spin s : {Spin::up, Spin::down}) {
    const auto t = hopping_matrix(p, lat, s);
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j)
        if (t(i, j) != cplx(0.0))
          h += t(i, j) * op::hop(lat.sites[static_cast<std::size_t>(i)], s, lat.sites[static_cast<std::size_t>(j)], s,
                                 lat.L);
  }
  for (Site x : lat.sites) h += p.U * (op::number(x, Spin::up, lat.L) * op::number(x, Spin::down, lat.L));
  return h;
}

void check_zero_energy(const ModelParams& p, const Lattice& lat, Check& chk) {
  const FockVector psi = construct_psi(p, lat);
  const FockVector hpsi = apply(hamiltonian_operator(p, lat), psi);
  const double err = std::sqrt(hpsi.norm2() / psi.norm2());
  chk.observe(err, [&] { return "L=" + std::to_string(lat.L) + " " + describe(p); });
}

/// exp(log_prefactor) B against the Gram determinant on every window of
/// length <= max_len inside [lo, hi].
void check_recursion_vs_gram(const ModelParams& p, int lo, int hi, int max_len, const Perturbation& fault,
                             Check& chk) {
  const DerivedConstants c = derive_constants(p);
  for (int x = lo; x <= hi; ++x) {
    const int y_max = std::min(hi, x + max_len - 1);
    if (c.q_unit()) {
      for (int y = x; y <= y_max; ++y) {
        const double err = rel_log_error(a_closed_qunit(x, y, c).log_value(), gram_log_det(x, y, p));
        chk.observe(err, [&] { return "closed form at [" + std::to_string(x) + "," + std::to_string(y) + "] " + describe(p); });
      }
      continue;
    }
    const auto t = b_forward<double>(x, y_max, *c.z, c, fault);
    for (int y = x; y <= y_max; ++y) {
      const double err = rel_log_error(t.log_norm(y).log_value(), gram_log_det(x, y, p));
      chk.observe(err, [&] { return "window [" + std::to_string(x) + "," + std::to_string(y) + "] " + describe(p); });
    }
  }
}

FockVector oracle_state(const ModelParams& p, const Lattice& lat) { return construct_psi(p, lat); }

void check_observables(const ModelParams& p, int L, Check& chk) {
  const Lattice lat = build_lattice(L);
  const FockVector psi = oracle_state(p, lat);
  const GroundState g(p, lat.l);
  auto ed = [&](const OperatorSum& o) { return expectation(o, psi); };
  auto where = [&](const std::string& what) { return [&, what] { return what + " L=" + std::to_string(L) + " " + describe(p); }; };

  for (Site x : lat.sites) {
    chk.observe(std::abs(g.density(x) - ed(op::number(x, L))), where("density at " + to_string(x)));
    for (int j = 1; j <= 3; ++j)
      chk.observe(std::abs(g.spin(x, j) - ed(op::spin(x, j, L))),
                  where("S" + std::to_string(j) + " at " + to_string(x)));
  }
  const auto ints = lat.integer_sites();
  for (Site x : ints)
    for (Site y : ints) {
      for (Spin s : {Spin::up, Spin::down})
        for (Spin t : {Spin::up, Spin::down})
          chk.observe(std::abs(g.electron(x, s, y, t) - ed(op::hop(x, s, y, t, L))),
                      where("electron " + to_string(x) + "," + to_string(y)));
      if (x == y) continue;
      chk.observe(std::abs(g.density_pair(x, y) - ed(op::number(x, L) * op::number(y, L))),
                  where("density pair " + to_string(x) + "," + to_string(y)));
      for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k)
          chk.observe(std::abs(g.spin_pair(x, y, j, k) - ed(op::spin(x, j, L) * op::spin(y, k, L))),
                      where("spin pair " + to_string(x) + "," + to_string(y)));
    }
}

/// B(x, y) for x in [lo, hi_x] and y in [x-2, y_max], indexed [x - lo][y - x + 2].
std::vector<std::vector<double>> forward_tables(int lo, int hi_x, int y_max, double z, const DerivedConstants& c) {
  std::vector<std::vector<double>> out;
  for (int x = lo; x <= hi_x; ++x) out.push_back(b_forward<double>(x, y_max, z, c).values);
  return out;
}

const std::vector<ModelParams>& three_points() {
  static const std::vector<ModelParams> pts = [] {
    ModelParams a;
    a.lambda = 1.25;
    a.q_abs = 1.2;
    a.theta = 0.3;
    a.zeta_abs = 0.5;
    a.zeta_phase = 0.4;
    ModelParams b;
    b.lambda = 0.8;
    b.q_abs = 0.7;
    b.theta = 0.0;
    b.zeta_abs = 1.3;
    b.U = 2.5;
    ModelParams c;
    c.lambda = 1.0;
    c.q_abs = 1.0;
    c.theta = 0.3;
    c.zeta_abs = 2.0;
    c.zeta_phase = -0.3;
    return std::vector<ModelParams>{a, b, c};
  }();
  return pts;
}

ModelParams fig3_params() {
  ModelParams p;
  p.lambda = 1.25;
  p.q_abs = 1.2;
  p.theta = 0.0;
  p.zeta_abs = std::pow(1.2, -20.0);
  return p;
}

}  // namespace

bool SuiteResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<ModelParams> standard_grid() {
  std::vector<ModelParams> out;
  for (double lam : {0.5, 1.25, 2.0})
    for (double q : {0.7, 1.2, 2.0})
      for (double th : {0.0, 0.3, 1.1}) {
        ModelParams p;
        p.lambda = lam;
        p.q_abs = q;
        p.theta = th;
        out.push_back(p);
      }
  return out;
}

SuiteResult criterion_zero_energy(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  SuiteResult res{1, "zero-energy ground state", {}, 0};
  Check chk("H psi = 0", 1e-10);
  const cplx zetas[] = {std::polar(0.3, 0.2), 1.0, 2.5};
  for (int L : o.Ls) {
    const Lattice lat = build_lattice(L);
    for (ModelParams p : standard_grid())
      for (cplx zeta : zetas) {
        p.zeta_abs = std::abs(zeta);
        p.zeta_phase = std::arg(zeta);
        check_zero_energy(p, lat, chk);
      }
  }
  res.checks.push_back(chk.done());
  res.seconds = seconds_since(t0);
  Check rt("runtime seconds", 120);
  rt.observe(res.seconds);
  res.checks.push_back(rt.done());
  return res;
}

SuiteResult criterion_ground_space(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  SuiteResult res{2, "ground-space uniqueness and degeneracy", {}, 0};
  Check per_sector("kernel dimension per magnetization sector = 1", 0);
  Check total("total kernel dimension = L + 1", 0);
  for (int L : o.Ls)
    for (const auto& p : three_points()) {
      const auto rep = ground_space_analysis(p, L, L);
      for (const auto& s : rep.sectors)
        per_sector.observe(std::abs(s.kernel_dim - 1.0), [&] {
          return "L=" + std::to_string(L) + " 2M=" + std::to_string(s.two_m) + " kernel " +
                 std::to_string(s.kernel_dim) + " " + describe(p);
        });
      total.observe(std::abs(rep.total - (L + 1.0)), [&] {
        return "L=" + std::to_string(L) + " total " + std::to_string(rep.total) + " " + describe(p);
      });
    }
  res.checks.push_back(per_sector.done());
  res.checks.push_back(total.done());
  res.seconds = seconds_since(t0);
  Check rt("runtime seconds", 300);
  rt.observe(res.seconds);
  res.checks.push_back(rt.done());
  return res;
}

SuiteResult criterion_recursion(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  SuiteResult res{3, "recursion against Gram determinants", {}, 0};
  Check rec("B recursion x prefactor = Gram determinant", 1e-11);
  for (double lam : {0.5, 1.25, 2.0})
    for (double q : {0.7, 1.2, 2.0})
      for (double z : {-1.5, 0.3, 2.0}) {
        ModelParams p;
        p.lambda = lam;
        p.q_abs = q;
        p.theta = 0.3;
        p.zeta_phase = 0.7;
        check_recursion_vs_gram(with_z(p, z), -6, 6, 12, o.fault, rec);
      }
  res.checks.push_back(rec.done());

  // |q| = 1: closed form against the plain three-term recursion and against Gram.
  Check closed("|q|=1 closed form = recursion", 1e-12);
  Check closed_gram("|q|=1 closed form = Gram determinant", 1e-11);
  for (double lam : {0.5, 1.25, 2.0})
    for (double zeta : {0.3, 1.0, 2.5}) {
      ModelParams p;
      p.lambda = lam;
      p.q_abs = 1.0;
      p.theta = 0.3;
      p.zeta_abs = zeta;
      const DerivedConstants c = derive_constants(p);
      const long double r2 = static_cast<long double>(c.r) * c.r;
      long double prev2 = 0, prev = 1;
      for (int n = 1; n <= 40; ++n) {
        const long double cur = (1 + r2) / r2 * prev - prev2 / r2;
        prev2 = prev;
        prev = cur;
        const double b = a_closed_qunit(0, n - 1, c).b_value;
        closed.observe(std::abs(b / static_cast<double>(cur) - 1.0),
                       [&] { return "window length " + std::to_string(n) + " " + describe(p); });
      }
      check_recursion_vs_gram(p, -6, 6, 12, o.fault, closed_gram);
    }
  res.checks.push_back(closed.done());
  res.checks.push_back(closed_gram.done());
  res.seconds = seconds_since(t0);
  Check rt("runtime seconds", 30);
  rt.observe(res.seconds);
  res.checks.push_back(rt.done());
  return res;
}

SuiteResult criterion_bounds(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{4, "bound suites", {}, 0};
  constexpr double kRound = 1e-14;  // floating-point slack on comparisons of O(1) quantities
  Check mono("B monotone in both endpoints", kRound);
  Check ratio_r("B(x,y)/B(x,y+1) within [1-G+, 1]", kRound);
  Check ratio_l("B(x,y)/B(x-1,y) within [1-G-, 1]", kRound);
  Check floor("ratios above r^2/(1+r^2)", kRound);
  Check large_lambda("lambda=10: ratios within 1e-3 of 1", 1e-3);
  Check sandwich("B <= C <= D", kRound);
  Check diff("C(x,y)-C(x,y-1) >= B(x,y)-B(x,y-1)", kRound);
  Check invariance("B invariant under |q| -> 1/|q|", 1e-12);
  constexpr int lo = -12, hi = 12, y_max = 14;
  for (double lam : {0.5, 1.25, 2.0, 10.0})
    for (double q : {0.7, 1.2, 2.0})
      for (double z : {-2.3, 0.0, 0.5, 1.5, 4.0}) {
        ModelParams p;
        p.lambda = lam;
        p.q_abs = q;
        p = with_z(p, z);
        const DerivedConstants c = derive_constants(p);
        ModelParams pinv = p;
        pinv.q_abs = 1.0 / q;
        const DerivedConstants cinv = derive_constants(pinv);
        const auto T = forward_tables(lo - 1, hi + 1, y_max, z, c);
        auto B = [&](int x, int y) { return T[static_cast<std::size_t>(x - (lo - 1))][static_cast<std::size_t>(y - x + 2)]; };
        const double r2 = c.r * c.r;
        const double gmax = f_coeff(0.0, c);
        auto where = [&](int x, int y) {
          return [&, x, y] { return "(x,y)=(" + std::to_string(x) + "," + std::to_string(y) + ") z=" + std::to_string(z) + " " + describe(p); };
        };
        for (int x = lo; x <= hi; ++x) {
          const auto C = c_recursive<double>(x, y_max, z, gmax, c);
          const auto Tinv = b_forward<double>(x, y_max, z, cinv);
          for (int y = x; y <= y_max; ++y) {
            const double bxy = B(x, y);
            mono.observe((B(x, y - 1) - bxy) / bxy, where(x, y));
            mono.observe((B(x + 1, y) - bxy) / bxy, where(x, y));
            const double cxy = C[static_cast<std::size_t>(y - x + 2)];
            const double dxy = d_closed<double>(y - x + 2, gmax, c);
            sandwich.observe((bxy - cxy) / cxy, where(x, y));
            sandwich.observe((cxy - dxy) / dxy, where(x, y));
            const double dc = cxy - C[static_cast<std::size_t>(y - x + 1)];
            const double db = bxy - B(x, y - 1);
            diff.observe((db - dc) / cxy, where(x, y));
            invariance.observe(std::abs(Tinv.at(y) / bxy - 1.0), where(x, y));
            if (y == x || y >= y_max) continue;
            const auto rb = ratio_bounds(x, y, z, c);
            const double rr = bxy / B(x, y + 1);
            const double rl = bxy / B(x - 1, y);
            ratio_r.observe(std::max(rb.right_lower - rr, rr - 1.0), where(x, y));
            ratio_l.observe(std::max(rb.left_lower - rl, rl - 1.0), where(x, y));
            floor.observe(r2 / (1 + r2) - std::min(rr, rl), where(x, y));
            if (lam == 10.0) large_lambda.observe(std::max(1.0 - rr, 1.0 - rl), where(x, y));
          }
        }
      }
  for (Check* k : {&mono, &ratio_r, &ratio_l, &floor, &large_lambda, &sandwich, &diff, &invariance})
    res.checks.push_back(k->done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult criterion_convergence(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{5, "convergence envelope", {}, 0};
  Check beta("beta < 1", 1.0 - 1e-15);
  Check steps("B(x,y)-B(x,y-1) <= K2 r^{-2(y-x)} + K3 beta^{y-x}", 1.0 + 1e-12);
  Check limit("certified b_limit error", 1e-10);
  Check shift("right limit shift covariance", 1e-12);
  for (double q : {0.7, 1.2, 2.0, 3.0})
    for (double lam : {0.5, 1.25, 2.0}) {
      ModelParams p;
      p.lambda = lam;
      p.q_abs = q;
      const DerivedConstants c = derive_constants(p);
      for (double z : {-2.3, 0.0, 1.5, 6.0})
        for (int x : {-3, 0, 4}) {
          auto where = [&] { return "x=" + std::to_string(x) + " z=" + std::to_string(z) + " " + describe(p); };
          const auto env = convergence_envelope(x, z, c);
          beta.observe(env.beta, where);
          // Differences obey D(y) = D(y-1)/r^2 + f(y-z-1/2) B(y-2)/r^2, all terms positive.
          const Recurrence<double> rec(c, z);
          double b2 = 0, b1 = 1, d = 1;  // B(x,x-2), B(x,x-1) and their difference
          for (int y = x; y <= x + 400; ++y) {
            d = d / rec.r2 + rec.f(y - z - 0.5) * b2 / rec.r2;
            b2 = b1;
            b1 += d;
            const double bound = env.step_bound(y);
            if (d < 1e-290 && bound < 1e-290) break;
            steps.observe(d / bound, where);
          }
          const auto lim = b_limit<double>(x, z, LimitDirection::right, 1e-12, c);
          limit.observe(lim.error_bound, where);
          const auto lim_left = b_limit<double>(x, z, LimitDirection::left, 1e-12, c);
          limit.observe(lim_left.error_bound, where);
          const auto lim_both = b_limit<double>(x, z, LimitDirection::both, 1e-12, c);
          limit.observe(lim_both.error_bound / lim_both.value, where);
          const auto shifted = b_limit<double>(x + 5, z + 5, LimitDirection::right, 1e-12, c);
          shift.observe(std::abs(shifted.value / lim.value - 1.0), where);
        }
    }
  for (Check* k : {&beta, &steps, &limit, &shift}) res.checks.push_back(k->done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult criterion_domain_wall_profile(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{6, "domain-wall profile at L=101", {}, 0};
  const ModelParams p = fig3_params();
  const GroundState g(p, 50);
  const auto& c = g.model().derived;
  const double plateau = p.lambda * p.lambda / std::sqrt(c.epsilon * c.epsilon - 4.0);
  Check integer_plateau("integer-site density plateau within 1%", 0.01);
  Check half_plateau("half-odd density plateau within 1% of the complement", 0.01);
  for (int x = -40; x <= 8; ++x) {
    integer_plateau.observe(std::abs(g.density(Site::integer(x)) / plateau - 1.0),
                            [&] { return "x=" + std::to_string(x); });
    half_plateau.observe(std::abs(g.density(Site::half(2 * x + 1)) / (1.0 - plateau) - 1.0),
                         [&] { return "x=" + std::to_string(x) + ".5"; });
  }
  for (int x = 32; x <= 40; ++x)
    integer_plateau.observe(std::abs(g.density(Site::integer(x)) / plateau - 1.0),
                            [&] { return "x=" + std::to_string(x); });
  Check crossing("S3 changes sign between 19.5 and 20.5", 0);
  const double s_before = g.spin(Site::half(39), 3), s_after = g.spin(Site::half(41), 3);
  crossing.observe(s_before > 0 && s_after < 0 ? 0.0 : 1.0, [&] {
    return "S3(19.5)=" + std::to_string(s_before) + " S3(20.5)=" + std::to_string(s_after);
  });
  const double width = fit_domain_wall(g).width();
  Check wall("wall width / (1/log|q|) within 10%", 0.10);
  wall.observe(std::abs(width * std::log(p.q_abs) - 1.0), [&] { return "width=" + std::to_string(width); });
  Check sum("sum of densities = L", 1e-8);
  double total = 0;
  for (int h = -101; h <= 101; ++h) total += g.density(Site::half(h));
  sum.observe(std::abs(total - 101.0));
  for (Check* k : {&integer_plateau, &half_plateau, &crossing, &wall, &sum}) res.checks.push_back(k->done());
  res.seconds = seconds_since(t0);
  Check rt("runtime seconds", 10);
  rt.observe(res.seconds);
  res.checks.push_back(rt.done());
  return res;
}

SuiteResult criterion_observables_vs_oracle(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{7, "analytic observables against the oracle at L=5", {}, 0};
  Check chk("|analytic - oracle|", 1e-10);
  for (const auto& p : three_points()) check_observables(p, 5, chk);
  res.checks.push_back(chk.done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult criterion_cluster(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{8, "cluster property", {}, 0};
  Check density("truncated density decay length <= 1.1/(2 log p)", 1.1);
  Check spin("truncated S3 S3 decay length <= 1.1/(2 log p)", 1.1);
  Check electron("electron two-point rate = log r within 2%", 0.02);
  for (double z : {0.0, 20.0})
    for (double lam : {1.25, 0.6}) {
      ModelParams p;
      p.lambda = lam;
      p.q_abs = 1.2;
      p = with_z(p, z);
      const int zc = static_cast<int>(std::lround(z));
      const int x0 = zc - 15;
      const auto g = GroundState::limit(p, x0 - 1, x0 + 41, 1e-12);
      const double two_log_p = 2.0 * std::log(g.model().derived.p);
      std::vector<Site> ys;
      for (int y = x0 + 1; y <= x0 + 40; ++y) ys.push_back(Site::integer(y));
      auto where = [&] { return "z=" + std::to_string(z) + " " + describe(p); };
      const auto td = truncated_density_scan(g, Site::integer(x0), ys);
      density.observe(td.fit.length() * two_log_p, where);
      std::vector<std::pair<double, double>> pts;
      for (Site y : ys) {
        if (std::abs(y.coordinate() - z) < 2.5) continue;
        pts.emplace_back(y.coordinate() - x0, g.truncated_spin33(Site::integer(x0), y));
      }
      spin.observe(fit_decay(pts).length() * two_log_p, where);

      const int xe = static_cast<int>(std::ceil(z)) + 5;
      const auto ge = GroundState::limit(p, xe - 1, xe + 26, 1e-12);
      std::vector<std::pair<double, double>> ept;
      for (int d = 5; d <= 25; ++d) {
        const Site a = Site::integer(xe), b = Site::integer(xe + d);
        ept.emplace_back(d, std::abs(ge.electron(a, Spin::up, b, Spin::up) + ge.electron(a, Spin::down, b, Spin::down)));
      }
      electron.observe(std::abs(fit_decay(ept).rate / std::log(g.model().derived.r) - 1.0), where);
    }
  for (Check* k : {&density, &spin, &electron}) res.checks.push_back(k->done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult criterion_sum_rules(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{9, "sum rule and spin length", {}, 0};
  Check sum("sum of densities = L", 1e-8);
  Check length("(S1)^2+(S2)^2+(S3)^2 = (n/2)^2", 1e-12);
  for (int L : {5, 101})
    for (ModelParams p : standard_grid())
      for (double z : {-1.3, 0.0, 2.5}) {
        p.zeta_phase = 0.25;
        p = with_z(p, z);
        const GroundState g(p, (L - 1) / 2);
        double total = 0;
        for (int h = -L; h <= L; ++h) {
          const Site x = Site::half(h);
          const double n = g.density(x);
          total += n;
          const double s1 = g.spin(x, 1), s2 = g.spin(x, 2), s3 = g.spin(x, 3);
          length.observe(std::abs(s1 * s1 + s2 * s2 + s3 * s3 - 0.25 * n * n),
                         [&] { return "L=" + std::to_string(L) + " at " + to_string(x) + " " + describe(p); });
        }
        sum.observe(std::abs(total - L), [&] { return "L=" + std::to_string(L) + " " + describe(p); });
      }
  res.checks.push_back(sum.done());
  res.checks.push_back(length.done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult criterion_symmetry(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult res{10, "symmetry suite at L=3", {}, 0};
  const Lattice lat = build_lattice(3);
  const Sector full = make_sector(3, 3);
  Check u1("[H, S3_tot] = 0", 1e-10);
  Check pi_op("Pi(S3_tot) = -S3_tot", 1e-12);
  Check pi_states("Pi maps eigenstates of sector M to -M", 1e-10);
  Check su2("[H, S1_tot] = [H, S2_tot] = 0 at q = 1", 1e-10);
  ModelParams a;
  a.lambda = 1.25;
  a.q_abs = 1.2;
  a.theta = 0.3;
  ModelParams b;
  b.lambda = 0.7;
  b.q_abs = 0.6;
  b.theta = 1.0;
  b.U = 3.0;
  const auto s3_full = to_matrix(op::spin_total(3, lat), full);
  for (const auto& p : {a, b}) {
    const auto h = build_hamiltonian(p, lat, full);
    const double hn = Eigen::MatrixXcd(h).norm();
    u1.observe((Eigen::MatrixXcd(h * s3_full - s3_full * h)).norm() / hn, [&] { return describe(p); });
    for (int two_m = -3; two_m <= 3; two_m += 2) {
      const Sector s = make_sector(3, 3, two_m), s_mirror = make_sector(3, 3, -two_m);
      const auto hs = build_hamiltonian(p, lat, s);
      const auto hm = build_hamiltonian(p, lat, s_mirror);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(hs)};
      const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const FockVector v = from_dense(es.eigenvectors().col(k), s);
        const Eigen::VectorXcd w = to_dense(symmetry_transform(Z2{}, v, lat), s_mirror);
        const double err = (hm * w - es.eigenvalues()[k] * w).norm() / (w.norm() * scale);
        pi_states.observe(err, [&] { return "2M=" + std::to_string(two_m) + " " + describe(p); });
      }
    }
  }
  const auto pi_s3 = to_matrix(symmetry_transform(Z2{}, op::spin_total(3, lat), lat), full);
  pi_op.observe(Eigen::MatrixXcd(pi_s3 + s3_full).norm());
  for (double lam : {0.6, 1.25}) {
    ModelParams p;
    p.lambda = lam;
    p.q_abs = 1.0;
    p.theta = 0.0;
    const auto h = build_hamiltonian(p, lat, full);
    const double hn = Eigen::MatrixXcd(h).norm();
    for (int j : {1, 2}) {
      const auto sj = to_matrix(op::spin_total(j, lat), full);
      su2.observe(Eigen::MatrixXcd(h * sj - sj * h).norm() / hn, [&] { return describe(p); });
    }
  }
  for (Check* k : {&u1, &pi_op, &pi_states, &su2}) res.checks.push_back(k->done());
  res.seconds = seconds_since(t0);
  return res;
}

SuiteResult run_criterion(int id, const VerifyOptions& o) {
  switch (id) {
    case 1:
      return criterion_zero_energy(o);
    case 2:
      return criterion_ground_space(o);
    case 3:
      return criterion_recursion(o);
    case 4:
      return criterion_bounds(o);
    case 5:
      return criterion_convergence(o);
    case 6:
      return criterion_domain_wall_profile(o);
    case 7:
      return criterion_observables_vs_oracle(o);
    case 8:
      return criterion_cluster(o);
    case 9:
      return criterion_sum_rules(o);
    case 10:
      return criterion_symmetry(o);
  }
  throw InvalidArgument("unknown criterion " + std::to_string(id));
}

SuiteResult point_suite(const ModelParams& p, int L, const VerifyOptions& o) {
  if (L < 3 || L > 7 || L % 2 == 0) throw InvalidArgument("point suite needs odd L in [3, 7]");
  const auto t0 = Clock::now();
  const Lattice lat = build_lattice(L);
  const DerivedConstants c = derive_constants(p);
  SuiteResult res{0, c.q_unit() ? "closed-form suite" : "B-recursion suite", {}, 0};
  Check rec(c.q_unit() ? "|q|=1 closed form = Gram determinant" : "B recursion x prefactor = Gram determinant",
            1e-11);
  check_recursion_vs_gram(p, -lat.l, lat.l, L, o.fault, rec);
  res.checks.push_back(rec.done());
  Check zero("H psi = 0", 1e-10);
  check_zero_energy(p, lat, zero);
  res.checks.push_back(zero.done());
  if (L <= 5) {
    Check obs("|analytic - oracle|", 1e-10);
    check_observables(p, L, obs);
    res.checks.push_back(obs.done());
  }
  res.seconds = seconds_since(t0);
  return res;
}

nlohmann::ordered_json to_json(const SuiteResult& r) {
  nlohmann::ordered_json j{{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"seconds", r.seconds}};
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e{{"invariant", c.invariant}, {"pass", c.pass},
                             {"worst", c.worst},         {"threshold", c.threshold},
                             {"evaluated", c.evaluated}, {"violations", c.violations}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(std::move(e));
  }
  return j;
}

}  // namespace flatband
