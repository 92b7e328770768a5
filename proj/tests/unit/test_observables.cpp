// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flatband/ed_oracle.hpp"
#include "flatband/error.hpp"
#include "flatband/observables.hpp"

using namespace flatband;

namespace {

ModelParams wall(double lambda, double q_abs, double z, double theta = 0.0, double zeta_phase = 0.0) {
  ModelParams p;
  p.lambda = lambda;
  p.q_abs = q_abs;
  p.theta = theta;
  p.zeta_abs = std::pow(q_abs, -z);
  p.zeta_phase = zeta_phase;
  return p;
}

ModelParams plain(double lambda, double q_abs, double theta, double zeta_abs, double zeta_phase) {
  ModelParams p;
  p.lambda = lambda;
  p.q_abs = q_abs;
  p.theta = theta;
  p.zeta_abs = zeta_abs;
  p.zeta_phase = zeta_phase;
  return p;
}

// Bulk density on the integer sublattice, lambda^2 / sqrt(eps^2 - 4).
double plateau(const ModelParams& p) {
  const double eps = p.lambda * p.lambda + std::sqrt(p.q_abs) + 1 / std::sqrt(p.q_abs);
  return p.lambda * p.lambda / std::sqrt(eps * eps - 4);
}

// Points checked against exact diagonalization; one each for |q| > 1, |q| < 1,
// |q| = 1 and the all-up state.
std::vector<ModelParams> oracle_points() {
  return {plain(1.25, 1.2, 0.3, 0.5, 0.4), plain(0.8, 0.7, 0.0, 1.3, 0.0), plain(1.0, 1.0, 0.3, 2.0, -0.3),
          plain(0.9, 1.4, 1.1, 0.0, 0.0)};
}

struct Oracle {
  Lattice lat;
  FockVector psi;
  GroundState g;

  Oracle(const ModelParams& p, int L) : lat(build_lattice(L)), psi(construct_psi(p, lat)), g(p, lat.l) {}
  cplx ed(const OperatorSum& o) const { return expectation(o, psi); }
};

double fitted_rate(const std::vector<std::pair<double, double>>& pts) { return fit_decay(pts).rate; }

}  // namespace

// ---- density one-point ----

TEST(Density, PlateausOnLongLattice) {
  const auto p = wall(1.25, 1.2, 20.0);
  const double P = plateau(p);
  EXPECT_NEAR(P, 0.5282, 5e-5);
  const GroundState g(p, 50);
  int checked = 0;
  for (int h = -90; h <= 90; ++h) {
    const Site x = Site::half(h);
    if (std::abs(x.coordinate() - 20.0) < 8) continue;
    ++checked;
    const double want = x.on_integer() ? P : 1 - P;
    EXPECT_LT(std::abs(g.density(x) / want - 1), 0.01) << to_string(x);
  }
  EXPECT_GT(checked, 100);
}

TEST(Density, MatchesOracle) {
  for (const auto& p : oracle_points())
    for (int L : {3, 5}) {
      const Oracle o(p, L);
      for (Site x : o.lat.sites) EXPECT_NEAR(o.g.density(x), o.ed(op::number(x, L)).real(), 1e-10) << to_string(x);
    }
}

TEST(Density, IntegerSitesStayBelowPlateau) {
  for (double lambda : {0.5, 1.25, 2.0})
    for (double q : {1.2, 2.0, 0.8})
      for (double z : {-3.0, 0.5, 4.0}) {
        const auto p = wall(lambda, q, z);
        const GroundState g(p, 20);
        for (Site x : build_lattice(41).integer_sites()) {
          EXPECT_LT(g.density(x), plateau(p) * (1 + 1e-12));
          EXPECT_GT(g.density(x), 0.0);
        }
      }
}

// Upper bound on half-odd sites assembled from the ratio bounds G+ and G-.
TEST(Density, HalfOddUpperBound) {
  for (double lambda : {0.6, 1.25, 2.0})
    for (double q : {1.2, 1.6})
      for (double z : {-2.3, 0.0, 3.5}) {
        const auto p = wall(lambda, q, z);
        const int l = 30;
        const GroundState g(p, l);
        const auto& c = g.model().derived;
        const double root = std::sqrt(c.epsilon * c.epsilon - 4);
        for (int h = -2 * l + 5; h <= 2 * l - 5; h += 2) {
          const double x = 0.5 * h;
          auto qp = [&](double e) { return std::pow(q, e); };
          const double a = qp(x - z) + qp(z - x);
          const double bm = qp(x - z - 0.5) + qp(z - x + 0.5);
          const double bp = qp(x - z + 0.5) + qp(z - x - 0.5);
          const int right_end = static_cast<int>(x + 0.5), left_end = static_cast<int>(std::floor(x - 1.5));
          const double gm = ratio_bounds(right_end, l, z, c).G_minus;
          const double gp = ratio_bounds(-l, left_end, z, c).G_plus;
          const double upper =
              (a / bm * (1 - a / (c.r * bp) * (1 - gm)) + a / bp * (1 - a / (c.r * bm) * (1 - gp))) / root;
          EXPECT_LT(g.density(Site::half(h)), upper * (1 + 1e-12)) << "x=" << x;
        }
      }
}

TEST(Density, HalfOddLowerBoundFromNeighbours) {
  for (double lambda : {0.6, 1.25})
    for (double q : {1.2, 1.6})
      for (double z : {-2.3, 3.5}) {
        const auto p = wall(lambda, q, z);
        const GroundState g(p, 30);
        const auto& c = g.model().derived;
        const double root = std::sqrt(c.epsilon * c.epsilon - 4);
        const double P = plateau(p);
        for (int h = -55; h <= 55; h += 2) {
          const double x = 0.5 * h;
          auto qp = [&](double e) { return std::pow(q, e); };
          const double a = qp(x - z) + qp(z - x);
          const double bm = qp(x - z - 0.5) + qp(z - x + 0.5);
          const double bp = qp(x - z + 0.5) + qp(z - x - 0.5);
          const double left = g.density(Site::half(h - 1)) / P;
          const double right = g.density(Site::half(h + 1)) / P;
          const double lower = (a / bm * (1 - a / (c.r * bp)) * left + a / bp * (1 - a / (c.r * bm)) * right) / root;
          EXPECT_GT(g.density(Site::half(h)), lower * (1 - 1e-12)) << "x=" << x;
        }
      }
}

TEST(Density, SumRuleAndRange) {
  for (int L : {5, 101})
    for (const auto& p : {wall(1.25, 1.2, 20.0), wall(0.5, 2.0, -1.5, 0.7), plain(2.0, 1.0, 0.2, 3.0, 0.0)}) {
      const GroundState g(p, (L - 1) / 2);
      double total = 0;
      for (Site x : build_lattice(L).sites) {
        const double n = g.density(x);
        EXPECT_GT(n, 0.0);
        EXPECT_LT(n, 2.0);
        total += n;
      }
      EXPECT_NEAR(total, L, 1e-8);
    }
}

TEST(Density, LimitModeMatchesLargeLattice) {
  const auto p = wall(1.25, 1.2, 3.0);
  const auto lim = GroundState::limit(p, -10, 10, 1e-12);
  const GroundState big(p, 400);
  for (int h = -20; h <= 20; ++h) EXPECT_NEAR(lim.density(Site::half(h)), big.density(Site::half(h)), 1e-10);
  EXPECT_LE(limit_half_length(p, -10, 10, 1e-6), limit_half_length(p, -10, 10, 1e-12));
}

TEST(Density, RejectsOutsideSites) {
  const GroundState g(wall(1.0, 1.2, 0.0), 2);
  EXPECT_THROW(g.density(Site::half(6)), InvalidArgument);
  EXPECT_THROW(g.spin(Site::integer(-3), 3), InvalidArgument);
  EXPECT_THROW(g.spin(Site::integer(0), 4), InvalidArgument);
  EXPECT_THROW(GroundState(wall(1.0, 1.2, 0.0), 0), InvalidArgument);
}

// ---- spin one-point ----

TEST(Spin, VanishesAtWallCenter) {
  const GroundState g(wall(1.25, 1.2, 3.0), 7);
  EXPECT_NEAR(g.spin(Site::integer(3), 3), 0.0, 1e-15);
  EXPECT_GT(g.spin(Site::integer(2), 3), 0.0);
  EXPECT_LT(g.spin(Site::integer(4), 3), 0.0);
  const GroundState h(wall(1.25, 1.2, 2.5), 7);
  EXPECT_NEAR(h.spin(Site::half(5), 3), 0.0, 1e-15);
}

TEST(Spin, MatchesOracle) {
  for (const auto& p : oracle_points()) {
    const Oracle o(p, 5);
    for (Site x : o.lat.sites)
      for (int j = 1; j <= 3; ++j) EXPECT_NEAR(o.g.spin(x, j), o.ed(op::spin(x, j, 5)).real(), 1e-10);
  }
}

TEST(Spin, LengthIdentity) {
  for (const auto& p : {wall(1.25, 1.2, 20.0, 0.3, 0.7), wall(0.4, 0.6, -5.2, 2.0, -1.0), plain(1.0, 1.0, 1.0, 0.3, 2.0)}) {
    const GroundState g(p, 50);
    for (Site x : build_lattice(101).sites) {
      const double s1 = g.spin(x, 1), s2 = g.spin(x, 2), s3 = g.spin(x, 3), n = g.density(x);
      EXPECT_NEAR(s1 * s1 + s2 * s2 + s3 * s3, 0.25 * n * n, 1e-12);
      EXPECT_LE(std::abs(s3), 1.0);
    }
  }
}

TEST(Spin, PitchAdvancesByTheta) {
  for (double theta : {0.3, -1.1, 2.0}) {
    const GroundState g(wall(1.25, 1.2, 0.0, theta, 0.5), 20);
    for (int x = -15; x < 15; ++x) {
      const double a0 = std::atan2(g.spin(Site::integer(x), 2), g.spin(Site::integer(x), 1));
      const double a1 = std::atan2(g.spin(Site::integer(x + 1), 2), g.spin(Site::integer(x + 1), 1));
      EXPECT_NEAR(std::remainder(a1 - a0 - theta, 2 * std::numbers::pi), 0.0, 1e-12);
    }
  }
}

TEST(Spin, AntisymmetricAboutWallInBulk) {
  const GroundState g(wall(1.25, 1.2, 0.0), 60);
  for (int d = 1; d <= 30; ++d)
    for (Site pair : {Site::integer(d), Site::half(2 * d + 1)}) {
      const Site mirror{-pair.half_units};
      const double plus = g.spin(pair, 3), minus = g.spin(mirror, 3);
      EXPECT_LT(std::abs(plus + minus), 0.01 * std::abs(minus)) << to_string(pair);
    }
}

TEST(Spin, AllUpState) {
  const auto p = plain(1.25, 1.2, 0.3, 0.0, 0.0);
  const GroundState g(p, 10);
  for (Site x : build_lattice(21).sites) {
    EXPECT_EQ(g.spin(x, 1), 0.0);
    EXPECT_EQ(g.spin(x, 2), 0.0);
    EXPECT_NEAR(g.spin(x, 3), 0.5 * g.density(x), 1e-15);
  }
}

// ---- electron two-point ----

TEST(Electron, MatchesOracle) {
  for (const auto& p : oracle_points()) {
    const Oracle o(p, 5);
    for (Site x : o.lat.integer_sites())
      for (Site y : o.lat.integer_sites())
        for (Spin s : {Spin::up, Spin::down})
          for (Spin t : {Spin::up, Spin::down})
            EXPECT_LT(std::abs(o.g.electron(x, s, y, t) - o.ed(op::hop(x, s, y, t, 5))), 1e-10);
  }
}

TEST(Electron, Hermitian) {
  const GroundState g(wall(1.0, 1.3, 1.5, 0.8, 0.2), 12);
  for (int x = -10; x <= 10; x += 3)
    for (int y = -10; y <= 10; y += 2)
      for (Spin s : {Spin::up, Spin::down})
        for (Spin t : {Spin::up, Spin::down}) {
          const cplx a = g.electron(Site::integer(x), s, Site::integer(y), t);
          const cplx b = g.electron(Site::integer(y), t, Site::integer(x), s);
          EXPECT_LT(std::abs(a - std::conj(b)), 1e-15 + 1e-13 * std::abs(a));
        }
}

TEST(Electron, DiagonalIsSpinResolvedDensity) {
  const GroundState g(wall(1.25, 1.2, 2.0, 0.3, 0.4), 10);
  for (int x = -9; x <= 9; ++x) {
    const Site s = Site::integer(x);
    const cplx up = g.electron(s, Spin::up, s, Spin::up), dn = g.electron(s, Spin::down, s, Spin::down);
    EXPECT_NEAR(up.imag(), 0.0, 1e-15);
    EXPECT_NEAR(up.real() + dn.real(), g.density(s), 1e-14);
    EXPECT_NEAR(0.5 * (up.real() - dn.real()), g.spin(s, 3), 1e-14);
    const cplx flip = g.electron(s, Spin::up, s, Spin::down);
    EXPECT_NEAR(flip.real(), g.spin(s, 1), 1e-14);
  }
}

TEST(Electron, DecaysWithInverseLengthLogR) {
  for (double lambda : {0.6, 1.25, 2.0}) {
    const auto p = wall(lambda, 1.2, 0.0, 0.3);
    const int x = 5;
    const auto g = GroundState::limit(p, x - 1, x + 26, 1e-12);
    std::vector<std::pair<double, double>> pts;
    for (int d = 5; d <= 25; ++d) {
      const Site a = Site::integer(x), b = Site::integer(x + d);
      pts.emplace_back(d, std::abs(g.electron(a, Spin::up, b, Spin::up) + g.electron(a, Spin::down, b, Spin::down)));
    }
    EXPECT_LT(std::abs(fitted_rate(pts) / std::log(g.model().derived.r) - 1), 0.02) << lambda;
  }
}

TEST(Electron, RefusesHalfOddSites) {
  const GroundState g(wall(1.0, 1.2, 0.0), 3);
  EXPECT_THROW(g.electron(Site::half(1), Spin::up, Site::integer(1), Spin::up), UnsupportedAnalyticForm);
  EXPECT_THROW(g.density_pair(Site::half(1), Site::integer(2)), UnsupportedAnalyticForm);
  EXPECT_THROW(g.spin_pair(Site::integer(0), Site::half(-3), 3, 3), UnsupportedAnalyticForm);
}

// ---- density and spin two-point ----

TEST(DensityPair, MatchesOracle) {
  for (const auto& p : oracle_points()) {
    const Oracle o(p, 5);
    for (Site x : o.lat.integer_sites())
      for (Site y : o.lat.integer_sites()) {
        if (x == y) continue;
        const double ed = o.ed(op::number(x, 5) * op::number(y, 5)).real();
        EXPECT_NEAR(o.g.density_pair(x, y), ed, 1e-10);
        EXPECT_NEAR(o.g.truncated_density(x, y), ed - o.g.density(x) * o.g.density(y), 1e-10);
      }
    EXPECT_THROW(o.g.density_pair(Site::integer(1), Site::integer(1)), InvalidArgument);
  }
}

TEST(DensityPair, TruncatedDecayRate) {
  for (double lambda : {0.6, 1.25, 3.0}) {
    const auto p = wall(lambda, 1.2, 0.0);
    const int x = 6;
    const auto g = GroundState::limit(p, x - 1, x + 40, 1e-12);
    std::vector<std::pair<double, double>> pts;
    for (int d = 5; d <= 30; ++d) pts.emplace_back(d, g.truncated_density(Site::integer(x), Site::integer(x + d)));
    EXPECT_GE(fitted_rate(pts), 2 * std::log(g.model().derived.p) * 0.95) << lambda;
  }
}

TEST(DensityPair, FactorizesAwayFromWall) {
  const auto p = wall(1.25, 1.2, 0.0);
  const auto g = GroundState::limit(p, 29, 71, 1e-12);
  const double P = plateau(p);
  EXPECT_LT(std::abs(g.density_pair(Site::integer(30), Site::integer(70)) / (P * P) - 1), 0.01);
}

TEST(SpinPair, MatchesOracle) {
  for (const auto& p : oracle_points()) {
    const Oracle o(p, 5);
    for (Site x : o.lat.integer_sites())
      for (Site y : o.lat.integer_sites()) {
        if (x == y) continue;
        EXPECT_NEAR(o.g.spin_pair(x, y, 3, 3), o.ed(op::spin(x, 3, 5) * op::spin(y, 3, 5)).real(), 1e-10);
        EXPECT_NEAR(o.g.truncated_spin33(x, y),
                    o.ed(op::spin(x, 3, 5) * op::spin(y, 3, 5)).real() - o.g.spin(x, 3) * o.g.spin(y, 3), 1e-10);
      }
  }
}

TEST(SpinPair, ClusterProperty) {
  const auto p = wall(1.25, 1.2, 2.0, 0.4, 0.3);
  const auto g = GroundState::limit(p, -1, 61, 1e-12);
  double prev = INFINITY;
  for (int d = 5; d <= 60; d += 5) {
    const Site a = Site::integer(0), b = Site::integer(d);
    const double tr = std::abs(g.truncated_spin33(a, b));
    EXPECT_LT(tr, prev);
    prev = tr;
    if (d >= 40) {
      EXPECT_LT(tr, 1e-8);
      EXPECT_NEAR(g.density_pair(a, b) / (g.density(a) * g.density(b)), 1.0, 1e-8);
      for (int j = 1; j <= 3; ++j)
        EXPECT_NEAR(g.spin_pair(a, b, j, j), g.spin(a, j) * g.spin(b, j), 1e-8);
    }
  }
}

TEST(Cluster, TruncatedBelowThresholdAtForty) {
  for (double lambda : {0.5, 1.25, 2.0})
    for (double z : {0.0, 5.0}) {
      const auto p = wall(lambda, 1.2, z);
      const auto g = GroundState::limit(p, -21, 61, 1e-12);
      for (int x = -20; x <= 20; x += 5)
        for (int d = 40; d <= 40 + 20 - (x > 0 ? x : 0); d += 5) {
          const Site a = Site::integer(x), b = Site::integer(x + d);
          EXPECT_LT(std::abs(g.truncated_density(a, b)), 1e-8);
          EXPECT_LT(std::abs(g.truncated_spin33(a, b)), 1e-8);
        }
    }
}

// ---- truncated correlations and fits ----

TEST(Truncated, DensityDecayLength) {
  // Profile differences cancel down to rounding beyond about 12 sites, so the
  // window stays short; the wall sits inside it to exercise the exclusion.
  const auto p = wall(1.25, 1.2, -25.0);
  const auto g = GroundState::limit(p, -31, -17, 1e-12);
  std::vector<Site> sites;
  std::vector<std::pair<Site, Site>> pairs;
  const Site x = Site::integer(-30);
  for (int y = -30; y <= -18; ++y) {
    sites.push_back(Site::integer(y));
    if (y != -30) pairs.emplace_back(x, Site::integer(y));
  }
  auto two = density_pair_profile(g, pairs);
  two.entries.push_back({x, x, 0.0});  // coincident pair is skipped
  const auto res = truncated_correlation(two, density_profile(g, sites), g.z());
  EXPECT_EQ(res.profile.entries.size(), pairs.size());
  EXPECT_LE(res.fit.length(), 1.1 / (2 * std::log(g.model().derived.p)));
  EXPECT_TRUE(std::isfinite(res.fit.residual));
  EXPECT_EQ(res.fit.points, 12 - 5);  // the five sites nearest the wall are dropped
}

TEST(Truncated, ScanMatchesProfileDifference) {
  const auto p = wall(0.9, 1.5, 0.0);
  const GroundState g(p, 25);
  std::vector<Site> ys;
  for (int y = -24; y <= 24; ++y) ys.push_back(Site::integer(y));
  const auto scan = truncated_density_scan(g, Site::integer(-12), ys);
  EXPECT_EQ(scan.profile.entries.size(), ys.size() - 1);
  for (const auto& e : scan.profile.entries) {
    const double direct = g.density_pair(e.x, *e.y) - g.density(e.x) * g.density(*e.y);
    EXPECT_NEAR(e.value.real(), direct, 1e-12);
  }
}

TEST(Truncated, ElectronModulusRate) {
  const auto p = wall(1.25, 1.2, -10.0, 0.3);
  const auto g = GroundState::limit(p, -1, 26, 1e-12);
  std::vector<std::pair<Site, Site>> pairs;
  for (int d = 5; d <= 25; ++d) pairs.emplace_back(Site::integer(0), Site::integer(d));
  const auto prof = electron_profile(g, Spin::down, Spin::down, pairs);
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : prof.entries) pts.emplace_back(e.y->coordinate() - e.x.coordinate(), std::abs(e.value));
  EXPECT_LT(std::abs(fit_decay(pts).rate / std::log(g.model().derived.r) - 1), 0.02);
}

TEST(Truncated, FitNeedsSixPoints) {
  std::vector<std::pair<double, double>> pts;
  for (int d = 1; d <= 5; ++d) pts.emplace_back(d, std::exp(-0.5 * d));
  EXPECT_THROW(fit_decay(pts), InvalidArgument);
  pts.emplace_back(6, std::exp(-3.0));
  const auto f = fit_decay(pts);
  EXPECT_NEAR(f.rate, 0.5, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  EXPECT_EQ(f.points, 6);
  EXPECT_EQ(f.window_lo, 1);
  EXPECT_EQ(f.window_hi, 6);
}

TEST(WallWidth, MatchesInverseLogQ) {
  const GroundState g(wall(1.25, 1.2, 20.0), 50);
  const double width = fit_domain_wall(g).width();
  EXPECT_LT(std::abs(width * std::log(1.2) - 1), 0.10);
  EXPECT_THROW(fit_domain_wall(GroundState(plain(1, 1, 0, 1, 0), 40)), InvalidArgument);
}

// ---- profiles ----

TEST(Profile, LookupAndInvariants) {
  const GroundState g(wall(1.25, 1.2, 1.0, 0.3), 6);
  const auto sites = build_lattice(13).sites;
  const auto n = density_profile(g, sites);
  const auto s3 = spin_profile(g, 3, sites);
  EXPECT_EQ(n.kind, ObservableKind::density1);
  EXPECT_EQ(s3.j, 3);
  for (const auto& e : n.entries) {
    EXPECT_EQ(e.value.imag(), 0.0);
    EXPECT_GT(e.value.real(), 0.0);
    EXPECT_LT(e.value.real(), 2.0);
  }
  for (const auto& e : s3.entries) EXPECT_LE(std::abs(e.value.real()), 1.0);
  EXPECT_EQ(n.at(Site::half(3)).real(), g.density(Site::half(3)));
  EXPECT_THROW(n.at(Site::half(40)), InvalidArgument);
  const auto e = electron_profile(g, Spin::up, Spin::down, {{Site::integer(-1), Site::integer(2)}});
  EXPECT_EQ(e.at(Site::integer(-1), Site::integer(2)), g.electron(Site::integer(-1), Spin::up, Site::integer(2), Spin::down));
  EXPECT_EQ(to_string(ObservableKind::electron2), "electron2");
  EXPECT_EQ(to_string(Source::oracle), "oracle");
}

// ---- symmetry breaking ----

TEST(Symmetry, RotationReflectionTranslation) {
  const auto p = wall(1.25, 1.2, 0.0, 0.3, 0.2);
  const auto rep = symmetry_breaking_report(p, 0, std::numbers::pi, 5);
  EXPECT_GT(std::abs(rep.s1), 1e-3);
  EXPECT_NEAR(rep.s1_rotated, -rep.s1, 1e-14);
  EXPECT_NE(rep.s1_rotated, rep.s1);
  EXPECT_LT(rep.translation_covariance, 1e-10);
  EXPECT_LT(rep.all_up_max_transverse, 1e-15);
  EXPECT_LT(rep.all_up_max_s3_gap, 1e-14);

  const auto lim = GroundState::limit(p, -20, 20, 1e-12);
  EXPECT_NEAR(rep.s3_translated, lim.spin(Site{rep.site.half_units + 10}, 3), 1e-10);
  EXPECT_NEAR(rep.s3_reflected, -lim.spin(Site{-rep.site.half_units}, 3), 1e-10);
}

TEST(Symmetry, TranslationShiftsWall) {
  const auto a = GroundState(wall(1.25, 1.2, 2.0), 40);
  const auto b = GroundState(wall(1.25, 1.2, -3.0), 40);
  for (int h = -30; h <= 30; ++h) EXPECT_NEAR(a.spin(Site::half(h + 10), 3), b.spin(Site::half(h), 3), 1e-10);
}
