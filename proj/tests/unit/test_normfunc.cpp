// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>

#include "flatband/ed_oracle.hpp"
#include "flatband/error.hpp"
#include "flatband/normfunc.hpp"

using namespace flatband;

namespace {

ModelParams make(double lambda, double q_abs, double theta, double zeta_abs, double zeta_phase = 0.0) {
  ModelParams p;
  p.lambda = lambda;
  p.q_abs = q_abs;
  p.theta = theta;
  p.zeta_abs = zeta_abs;
  p.zeta_phase = zeta_phase;
  return p;
}

// Parameters whose wall sits at z for |q| != 1.
ModelParams at_wall(double lambda, double q_abs, double theta, double z, double zeta_phase = 0.4) {
  return make(lambda, q_abs, theta, std::pow(q_abs, -z), zeta_phase);
}

// A(x,y) from its own three-term recursion, seeded by A(x,x-2) = 0, A(x,x-1) = 1.
long double a_by_recursion(int x, int y, const ModelParams& p) {
  const long double eps = p.lambda * p.lambda + std::sqrt(p.q_abs) + 1 / std::sqrt(p.q_abs);
  auto w = [&](long double u) {
    const long double m = p.zeta_abs * std::pow(static_cast<long double>(p.q_abs), u);
    return 1 + m * m;
  };
  long double a2 = 0, a1 = 1;
  for (int k = x; k <= y; ++k) {
    const long double a = eps * w(k) * a1 - w(k - 0.5L) * w(k - 0.5L) * a2;
    a2 = a1;
    a1 = a;
  }
  return a1;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

// ---- boundary values ----

TEST(BoundaryA, DiagonalClosedForm) {
  const auto p = make(1.25, 1.2, 0.3, 0.5);
  const auto c = derive_constants(p);
  for (int x = -4; x <= 4; ++x) {
    const double m = 0.5 * std::pow(1.2, x);
    EXPECT_NEAR(boundary_A(x, c).a_xx, c.epsilon * (1 + m * m), 1e-13);
  }
}

TEST(BoundaryA, ZeroZeta) {
  const auto c = derive_constants(make(1.25, 1.2, 0.3, 0.0));
  const auto b = boundary_A(3, c);
  EXPECT_DOUBLE_EQ(b.a_xx, c.epsilon);
  EXPECT_NEAR(b.a_x_xp1, c.epsilon * c.epsilon - 1, 1e-13);
  EXPECT_NEAR(b.a_xm1_x, c.epsilon * c.epsilon - 1, 1e-13);
}

TEST(BoundaryA, MatchesTwoByTwoGram) {
  const auto p = make(1.25, 1.2, 0.3, 0.5);
  const auto c = derive_constants(p);
  for (int x = -3; x <= 3; ++x) {
    const auto b = boundary_A(x, c);
    EXPECT_LT(rel(b.a_x_xp1, std::exp(gram_log_det(x, x + 1, p))), 1e-12) << x;
    EXPECT_LT(rel(b.a_xm1_x, std::exp(gram_log_det(x - 1, x, p))), 1e-12) << x;
    EXPECT_LT(rel(b.a_xx, std::exp(gram_log_det(x, x, p))), 1e-12) << x;
  }
}

// ---- |q| = 1 closed form ----

TEST(ClosedFormUnitQ, SingleSite) {
  const auto p = make(0.8, 1.0, 0.2, 1.7);
  const auto c = derive_constants(p);
  const auto v = a_closed_qunit(2, 2, c);
  EXPECT_LT(rel(std::exp(v.log_value()), c.epsilon * (1 + 1.7 * 1.7)), 1e-13);
}

TEST(ClosedFormUnitQ, FormalBoundary) {
  const auto c = derive_constants(make(0.8, 1.0, 0.0, 1.7));
  EXPECT_NEAR(std::exp(a_closed_qunit(4, 3, c).log_value()), 1.0, 1e-15);
  EXPECT_EQ(a_closed_qunit(4, 2, c).b_value, 0.0);
}

TEST(ClosedFormUnitQ, MatchesRecursionAtLengthSix) {
  const auto p = make(1.0, 1.0, 0.0, 1.0);
  const auto c = derive_constants(p);
  const double closed = a_closed_qunit(0, 5, c).log_value();
  EXPECT_LT(rel(closed, std::log(static_cast<double>(a_by_recursion(0, 5, p)))), 1e-12);
  EXPECT_LT(rel(std::exp(closed), static_cast<double>(a_by_recursion(0, 5, p))), 1e-12);
}

TEST(ClosedFormUnitQ, MatchesRecursionUpToForty) {
  for (double lambda : {0.3, 1.0, 2.0})
    for (double zeta : {0.2, 1.0, 3.0}) {
      const auto p = make(lambda, 1.0, 0.7, zeta);
      const auto c = derive_constants(p);
      for (int n = 0; n <= 40; ++n) {
        const double want = std::log(static_cast<double>(a_by_recursion(-3, -3 + n, p)));
        EXPECT_LT(std::abs(a_closed_qunit(-3, -3 + n, c).log_value() - want), 1e-12 * std::max(1.0, want));
      }
    }
}

TEST(ClosedFormUnitQ, MatchesGram) {
  const auto p = make(0.6, 1.0, 1.1, 2.2, 0.3);
  const auto c = derive_constants(p);
  for (int y = -2; y <= 6; ++y)
    EXPECT_LT(rel(a_closed_qunit(-2, y, c).log_value(), gram_log_det(-2, y, p)), 1e-11);
}

TEST(ClosedFormUnitQ, RejectsOtherModulus) {
  EXPECT_THROW(a_closed_qunit(0, 3, derive_constants(make(1, 1.2, 0, 1))), InvalidArgument);
}

TEST(ClosedFormUnitQ, BValueUsesClosedForm) {
  const auto c = derive_constants(make(0.9, 1.0, 0.0, 0.5));
  for (int n = 0; n <= 20; ++n) {
    const auto v = a_closed_qunit(1, 1 + n, c);
    EXPECT_LT(rel(b_value(1, 1 + n, 0.0, c), v.b_value), 1e-14);
  }
  EXPECT_THROW(b_forward(0, 4, 0.0, c), InvalidArgument);
}

// ---- forward recursion ----

TEST(BForward, FirstStep) {
  for (double q : {1.2, 2.0, 0.7}) {
    const auto c = derive_constants(make(1.25, q, 0, 1));
    for (double z : {-7.3, 0.0, 2.5}) {
      const auto t = b_forward(3, 3, z, c);
      EXPECT_NEAR(t.at(3), (1 + c.r * c.r) / (c.r * c.r), 1e-15);
    }
  }
}

TEST(BForward, ShiftCovariance) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const auto base = b_forward(-4, 20, 1.3, c);
  for (int k : {-6, 1, 9}) {
    const auto moved = b_forward(-4 + k, 20 + k, 1.3 + k, c);
    for (int y = -4; y <= 20; ++y) EXPECT_NEAR(moved.at(y + k), base.at(y), 1e-13 * base.at(y));
  }
}

TEST(BForward, TableInvariants) {
  const auto c = derive_constants(make(0.7, 1.5, 0, 1));
  const auto t = b_forward(-10, 30, 3.3, c);
  EXPECT_EQ(t.values.size(), 43u);
  EXPECT_EQ(t.values[0], 0.0);
  EXPECT_EQ(t.values[1], 1.0);
  for (std::size_t i = 1; i < t.values.size(); ++i) {
    EXPECT_TRUE(std::isfinite(t.values[i]));
    EXPECT_GT(t.values[i], 0.0);
    if (i > 1) EXPECT_GE(t.values[i], t.values[i - 1]);
  }
  EXPECT_THROW(t.at(31), InvalidArgument);
  EXPECT_THROW(b_forward(0, -3, 0.0, c), InvalidArgument);
}

TEST(BForward, MatchesGramAtReferencePoint) {
  const auto p = at_wall(1.25, 1.2, 0.3, 2.0);
  const auto c = derive_constants(p);
  for (int x = -5; x <= 5; ++x) {
    const auto t = b_forward(x, x + 11, *c.z, c);
    for (int y = x; y <= x + 11; ++y) {
      const auto v = t.log_norm(y);
      EXPECT_LT(rel(std::exp(v.log_value()), std::exp(gram_log_det(x, y, p))), 1e-12) << x << "," << y;
    }
  }
}

TEST(BForward, MatchesGramAcrossGrid) {
  for (double lambda : {0.5, 1.25, 2.0})
    for (double q : {0.7, 1.2, 2.0})
      for (double z : {-3.0, 0.5, 4.2}) {
        const auto p = at_wall(lambda, q, 0.9, z);
        const auto c = derive_constants(p);
        const auto t = b_forward(-6, 5, *c.z, c);
        for (int y = -6; y <= 5; ++y)
          EXPECT_LT(rel(t.log_norm(y).log_value(), gram_log_det(-6, y, p)), 1e-11)
              << lambda << " " << q << " " << z << " y=" << y;
      }
}

TEST(BForward, MatchesOwnARecursion) {
  const auto p = at_wall(1.0, 1.3, 0.0, 1.5);
  const auto c = derive_constants(p);
  const auto t = b_forward(-3, 9, *c.z, c);
  for (int y = -3; y <= 9; ++y)
    EXPECT_LT(rel(t.log_norm(y).log_value(), std::log(static_cast<double>(a_by_recursion(-3, y, p)))), 1e-12);
}

TEST(BForward, LongDoubleShadow) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const auto d = b_forward<double>(-20, 60, 4.5, c);
  const auto e = b_forward<long double>(-20, 60, 4.5L, c);
  for (int y = -20; y <= 60; ++y) EXPECT_LT(rel(d.at(y), static_cast<double>(e.at(y))), 1e-13);
}

TEST(BForward, CsvDump) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const auto t = b_forward(0, 3, 0.0, c);
  std::ostringstream os;
  write_table_csv(os, t);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "y,B,log_prefactor");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  EXPECT_NE(os.str().find("\n-2,0,"), std::string::npos);
}

// ---- backward recursion and split ----

TEST(BBackward, FirstStep) {
  const auto c = derive_constants(make(0.4, 2.0, 0, 1));
  EXPECT_NEAR(b_backward(5, 5, -1.0, c).at(5), (1 + c.r * c.r) / (c.r * c.r), 1e-15);
}

TEST(BBackward, AgreesWithForward) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const double z = 2.3;
  for (int y = -10; y <= 10; y += 4) {
    const auto back = b_backward(-15, y, z, c);
    for (int x = -15; x <= y; ++x) EXPECT_LT(rel(back.at(x), b_forward(x, y, z, c).at(y)), 1e-13);
  }
}

TEST(BBackward, InverseModulusInvariance) {
  for (double q : {1.2, 1.7, 3.0}) {
    const auto a = derive_constants(make(0.9, q, 0, 1));
    const auto b = derive_constants(make(0.9, 1 / q, 0, 1));
    for (double z : {-2.5, 0.0, 6.1}) {
      const auto fa = b_forward(-8, 25, z, a);
      const auto fb = b_forward(-8, 25, z, b);
      const auto ba = b_backward(-25, 8, z, a);
      const auto bb = b_backward(-25, 8, z, b);
      for (int y = -8; y <= 25; ++y) EXPECT_LT(rel(fb.at(y), fa.at(y)), 1e-12);
      for (int x = -25; x <= 8; ++x) EXPECT_LT(rel(bb.at(x), ba.at(x)), 1e-12);
    }
  }
}

TEST(BSplit, EndpointsAndInterior) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const double z = 1.7;
  const int x = -4, y = 6;
  const double want = b_forward(x, y, z, c).at(y);
  EXPECT_LT(rel(b_split(x, x, y, z, c), want), 1e-12);
  EXPECT_LT(rel(b_split(x, y, y, z, c), b_backward(x, y, z, c).at(x)), 1e-12);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(x + 1, y - 1);
  for (int i = 0; i < 20; ++i) EXPECT_LT(rel(b_split(x, pick(rng), y, z, c), want), 1e-12);
}

TEST(BSplit, ConsistentOnLongWindows) {
  const auto c = derive_constants(make(0.6, 1.4, 0, 1));
  const double z = -3.2;
  for (int len = 1; len <= 40; len += 3) {
    const double want = b_forward(-20, -20 + len, z, c).at(-20 + len);
    for (int w = -20; w <= -20 + len; ++w) EXPECT_LT(rel(b_split(-20, w, -20 + len, z, c), want), 1e-12);
  }
}

TEST(BSplit, OrderingViolation) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  EXPECT_THROW(b_split(0, 5, 4, 0.0, c), InvalidArgument);
  EXPECT_THROW(b_split(0, -1, 4, 0.0, c), InvalidArgument);
}

TEST(BMonotone, BothEnds) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  for (double z : {-5.0, 0.4, 12.0})
    for (int x = -12; x <= 12; x += 3)
      for (int y = x; y <= x + 30; ++y) {
        const double b = b_value(x, y, z, c);
        EXPECT_GE(b, b_value(x, y - 1, z, c));
        EXPECT_GE(b, b_value(x + 1, y, z, c));
      }
}

// ---- comparison functions ----

TEST(DClosed, ShortWindows) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const double g = f_coeff(0, c);
  EXPECT_NEAR(d_closed(0, g, c), 0.0, 1e-15);
  EXPECT_NEAR(d_closed(1, g, c), 1.0, 1e-15);
  EXPECT_NEAR(d_closed(2, g, c), (1 + c.r * c.r) / (c.r * c.r), 1e-14);
}

TEST(DClosed, GeometricWhenGVanishes) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  double sum = 0;
  for (int n = 1; n <= 25; ++n) {
    sum += std::pow(c.r, -2.0 * (n - 1));
    EXPECT_NEAR(d_closed(n, 0.0, c), sum, 1e-14);
  }
}

TEST(DClosed, MatchesRecursion) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const double g = f_coeff(0, c);
  const double r2 = c.r * c.r;
  double d2 = 0, d1 = 1;
  for (int n = 2; n <= 10; ++n) {
    const double d = (1 + r2) / r2 * d1 - (1 - g) / r2 * d2;
    d2 = d1;
    d1 = d;
  }
  EXPECT_NEAR(d_closed(10, g, c), d1, 1e-13);
}

TEST(DClosed, RootRange) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  for (double g : {0.01, 0.2, 0.9}) {
    const auto R = d_roots(g, c);
    EXPECT_GT(R.gamma, 0.0);
    EXPECT_LT(R.gamma, 1 / (c.r * c.r));
    EXPECT_NEAR(R.r_plus + R.r_minus, 1 + 1 / (c.r * c.r), 1e-15);
  }
}

TEST(DClosed, RejectsBadG) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  EXPECT_THROW(d_closed(3, -0.1, c), InvalidArgument);
  EXPECT_THROW(d_closed(3, 1.0, c), InvalidArgument);
  EXPECT_THROW(d_closed(-1, 0.1, c), InvalidArgument);
}

TEST(CRecursive, EqualsBWithoutSource) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const double z = 5000;
  const auto cc = c_recursive(0, 30, z, 0.0, c);
  const auto b = b_forward(0, 30, z, c);
  ASSERT_EQ(cc.size(), b.values.size());
  for (std::size_t i = 0; i < cc.size(); ++i) EXPECT_EQ(cc[i], b.values[i]);
}

TEST(CRecursive, Sandwich) {
  for (double q : {1.05, 1.2, 2.0})
    for (double lambda : {0.4, 1.25})
      for (double z : {-3.5, 0.0, 2.5, 14.0}) {
        const auto c = derive_constants(make(lambda, q, 0, 1));
        const double g = f_coeff(0, c);
        const int x0 = -6, ymax = 40;
        const auto cc = c_recursive(x0, ymax, z, g, c);
        const auto b = b_forward(x0, ymax, z, c);
        for (int y = x0 - 1; y <= ymax; ++y) {
          const std::size_t i = static_cast<std::size_t>(y - x0 + 2);
          const double d = d_closed(static_cast<int>(i), g, c);
          EXPECT_LE(b.values[i], cc[i] * (1 + 1e-14));
          EXPECT_LE(cc[i], d * (1 + 1e-14));
          if (y >= x0) EXPECT_LE(b.values[i] - b.values[i - 1], cc[i] - cc[i - 1] + 1e-14);
        }
      }
}

TEST(CRecursive, RejectsSmallG) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  EXPECT_THROW(c_recursive(0, 10, 3.0, 0.5 * f_coeff(0, c), c), PreconditionViolation);
}

// ---- infinite-window limits ----

TEST(Envelope, BetaBelowOne) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const auto env = convergence_envelope(0, 0.0, f_coeff(0, c), c);
  EXPECT_GT(env.beta, 0.0);
  EXPECT_LT(env.beta, 1.0);
  for (double q : {1.01, 1.5, 3.0, 10.0})
    for (double lambda : {0.0, 0.5, 2.0, 8.0}) {
      const auto cc = derive_constants(make(lambda, q, 0, 1));
      EXPECT_LT(convergence_envelope(-3, 2.0, cc).beta, 1.0) << q << " " << lambda;
    }
}

TEST(Envelope, DominatesSteps) {
  for (double q : {1.1, 1.2, 2.0})
    for (double lambda : {0.5, 1.25, 3.0})
      for (double z : {-4.0, 0.0, 7.5}) {
        const auto c = derive_constants(make(lambda, q, 0, 1));
        const int x = -2;
        const auto env = convergence_envelope(x, z, c);
        const auto t = b_forward(x, x + 150, z, c);
        for (int y = x; y <= x + 150; ++y)
          // Differences of O(1) values carry a few ulp of rounding.
          EXPECT_LE(t.at(y) - t.at(y - 1), env.step_bound(y) * (1 + 1e-12) + 8 * DBL_EPSILON * t.at(y)) << q << " " << lambda << " " << z;
      }
}

TEST(BLimit, CertifiedAgainstLongWindow) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  for (double z : {-3.0, 0.0, 6.5}) {
    const auto lim = b_limit(0, z, LimitDirection::right, 1e-13, c);
    EXPECT_LT(lim.error_bound, 1e-10);
    const double far = b_forward(0, 3000, z, c).at(3000);
    EXPECT_LE(std::abs(far - lim.value), lim.error_bound + 1e-13);
    const auto left = b_limit(0, z, LimitDirection::left, 1e-13, c);
    const double far_left = b_backward(-3000, 0, z, c).at(-3000);
    EXPECT_LE(std::abs(far_left - left.value), left.error_bound + 1e-13);
  }
}

TEST(BLimit, BothSidesMatchesWideWindow) {
  const auto c = derive_constants(make(0.9, 1.5, 0, 1));
  const auto both = b_limit(2, 1.5, LimitDirection::both, 1e-13, c);
  const double wide = b_value(-2000, 2000, 1.5, c);
  EXPECT_LT(rel(both.value, wide), 1e-11);
  EXPECT_LT(rel(b_limit(-7, 1.5, LimitDirection::both, 1e-13, c).value, wide), 1e-11);
}

TEST(BLimit, ShiftCovariance) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const auto a = b_limit(0, 0.0, LimitDirection::right, 1e-13, c);
  const auto b = b_limit(5, 5.0, LimitDirection::right, 1e-13, c);
  EXPECT_NEAR(a.value, b.value, 1e-12);
}

TEST(BLimit, Rejections) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  EXPECT_THROW(b_limit(0, 0.0, LimitDirection::right, 0.0, c), InvalidArgument);
  EXPECT_THROW(b_limit(0, 0.0, LimitDirection::right, 1e-12, derive_constants(make(1, 1, 0, 1))), InvalidArgument);
}

// ---- ratio bounds ----

TEST(RatioBounds, HoldOnHundredPointGrid) {
  int points = 0;
  for (double lambda : {0.3, 0.8, 1.25, 2.0, 4.0})
    for (double q : {1.05, 1.2, 1.5, 2.5})
      for (double z : {-3.3, 0.0, 0.5, 2.7, 10.0}) {
        ++points;
        const auto c = derive_constants(make(lambda, q, 0, 1));
        const double floor = c.r * c.r / (1 + c.r * c.r);
        for (int x = -8; x <= 8; x += 2)
          for (int y = x + 1; y <= x + 20; ++y) {
            const auto rb = ratio_bounds(x, y, z, c);
            const double right = b_value(x, y, z, c) / b_value(x, y + 1, z, c);
            const double left = b_value(x, y, z, c) / b_value(x - 1, y, z, c);
            EXPECT_GE(right, rb.right_lower - 1e-14);
            EXPECT_LE(right, 1.0 + 1e-14);
            EXPECT_GE(left, rb.left_lower - 1e-14);
            EXPECT_LE(left, 1.0 + 1e-14);
            EXPECT_GT(right, floor);
            EXPECT_GT(left, floor);
            EXPECT_GE(rb.right_lower, floor - 1e-15);
          }
      }
  EXPECT_EQ(points, 100);
}

TEST(RatioBounds, LargeLambdaApproachesOne) {
  const auto c = derive_constants(make(10.0, 1.2, 0, 1));
  for (int y = 1; y <= 20; ++y) {
    EXPECT_NEAR(b_value(0, y, 3.0, c) / b_value(0, y + 1, 3.0, c), 1.0, 1e-3);
    EXPECT_NEAR(b_value(0, y, 3.0, c) / b_value(-1, y, 3.0, c), 1.0, 1e-3);
    EXPECT_GT(ratio_bounds(0, y, 3.0, c).right_lower, 1 - 1e-3);
  }
}

TEST(RatioBounds, ClosedFormsMatchSums) {
  for (double q : {1.2, 2.0})
    for (double z : {-4.0, 0.3, 2.5, 3.0, 9.0}) {
      const auto c = derive_constants(make(1.0, q, 0, 1));
      for (int x = -6; x <= 6; ++x)
        for (int y = x + 1; y <= x + 15; ++y) {
          EXPECT_LT(rel(g_tilde_plus(x, y, z, c), g_tilde_plus_sum(x, y, z, c)), 1e-10) << x << " " << y << " " << z;
          EXPECT_LT(rel(g_tilde_minus(x, y, z, c), g_tilde_minus_sum(x, y, z, c)), 1e-10) << x << " " << y << " " << z;
        }
    }
}

TEST(RatioBounds, RequiresOrderedWindow) {
  const auto c = derive_constants(make(1.0, 1.2, 0, 1));
  EXPECT_THROW(ratio_bounds(3, 3, 0.0, c), InvalidArgument);
}

// ---- truncated products ----

TEST(CrossDifference, MatchesDirectEvaluation) {
  for (double q : {1.2, 1.0}) {
    const auto c = derive_constants(make(1.25, q, 0, 1));
    const double z = q == 1.0 ? 0.0 : 1.5;
    for (int a = -3; a <= 2; ++a)
      for (int k = a - 1; k <= a + 4; ++k) {
        const int lo = -6, hi = 8;
        const long double direct =
            b_value<long double>(a, k, z, c) * b_value<long double>(lo, hi, z, c) -
            b_value<long double>(a, hi, z, c) * b_value<long double>(lo, k, z, c);
        const auto s = cross_difference(a, k, lo, hi, z, c);
        EXPECT_LT(std::abs(s.value() - static_cast<double>(direct)), 1e-12 * std::abs(static_cast<double>(direct)) + 1e-16)
            << q << " a=" << a << " k=" << k;
        if (std::abs(direct) > 1e-12) EXPECT_EQ(s.sign, direct > 0 ? 1 : -1);
      }
  }
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  EXPECT_EQ(cross_difference(0, 8, -4, 8, 0.0, c).sign, 0);
  EXPECT_THROW(cross_difference(0, 9, -4, 8, 0.0, c), InvalidArgument);
}

namespace {

double measured_truncated(int y, int u, double z, const DerivedConstants& c) {
  return std::abs(cross_difference(y + 1, u - 1, -500, 500, z, c).value());
}

}  // namespace

TEST(TruncatedNormBound, DominatesMeasured) {
  for (double lambda : {1.25, 0.5})
    for (double q : {1.2, 1.5}) {
      const auto c = derive_constants(make(lambda, q, 0, 1));
      const int y = 0;
      const double z = 2.0, w = std::max<double>(y, z);
      for (int d = 5; d <= 30; ++d) {
        const int u = static_cast<int>(w) + d;
        EXPECT_LE(measured_truncated(y, u, z, c), truncated_norm_bound(y, u, z, w, c)) << lambda << " " << q << " d=" << d;
      }
    }
}

TEST(TruncatedNormBound, RatioIsInversePSquared) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  for (int u = 8; u <= 30; ++u)
    EXPECT_NEAR(truncated_norm_bound(0, u + 1, 2.0, 2.0, c) / truncated_norm_bound(0, u, 2.0, 2.0, c),
                std::pow(c.p, -2.0), 1e-12);
}

TEST(TruncatedNormBound, MeasuredSlope) {
  const auto c = derive_constants(make(1.25, 1.2, 0, 1));
  const int y = 0;
  const double z = 2.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int u = 7; u <= 32; ++u, ++n) {
    const double v = std::log(measured_truncated(y, u, z, c));
    sx += u;
    sy += v;
    sxx += double(u) * u;
    sxy += u * v;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_LE(slope, -2 * std::log(c.p) * (1 - 0.05));
}

TEST(LogNorm, ValueComposition) {
  const LogNormValue<double> v{2.0, 3.0};
  EXPECT_NEAR(v.log_value(), 2.0 + std::log(3.0), 1e-15);
}
