// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// Ground-state expectation values of Psi(zeta) written as ratios of the
// rescaled normalization function. Finite lattices use B(-l, .) and B(., l)
// tables directly; the infinite-volume mode picks l large enough that the
// convergence envelope certifies the requested accuracy.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flatband/fock.hpp"
#include "flatband/model.hpp"
#include "flatband/normfunc.hpp"

namespace flatband {

class GroundState {
 public:
  /// Finite lattice L = 2l + 1.
  GroundState(const ModelParams& p, int l);

  /// Infinite-volume proxy accurate to `tol` on integer sites lo..hi.
  static GroundState limit(const ModelParams& p, int lo, int hi, double tol = 1e-12);

  const Model& model() const { return model_; }
  int l() const { return l_; }
  /// Domain-wall center, 0 when |q| = 1.
  double z() const { return z_; }
  bool contains(Site x) const { return x.half_units >= -(2 * l_ + 1) && x.half_units <= 2 * l_ + 1; }

  double density(Site x) const;
  double spin(Site x, int j) const;
  /// <c^dag_{x s} c_{y t}> for integer sites.
  cplx electron(Site x, Spin s, Site y, Spin t) const;
  /// <n_x n_y>, x != y integer sites.
  double density_pair(Site x, Site y) const;
  double spin_pair(Site x, Site y, int j, int k) const;
  /// <n_x n_y> - <n_x><n_y>, evaluated without cancellation.
  double truncated_density(Site x, Site y) const;
  /// <S3_x S3_y> - <S3_x><S3_y>.
  double truncated_spin33(Site x, Site y) const;

  /// B(a, b) on this lattice's z, with formal boundary values.
  double b(int a, int b) const;
  /// B(-l, k) and B(k, l).
  double b_left(int k) const;
  double b_right(int k) const;
  double b_total() const { return total_; }

 private:
  Model model_;
  int l_;
  double z_;
  std::vector<double> left_;   // k = -l-2 ... l
  std::vector<double> right_;  // k = -l ... l+2
  double total_;

  double log1p_weight(double w) const;  // ln(1 + |zeta q^w|^2)
  double log_rho(int w) const;
  void require_site(Site x) const;
  static void require_integer(Site x, const char* who);
};

/// Lattice half-length needed so that B(k, l) and B(-l, k') with
/// lo-1 <= k, k' <= hi+1 sit within `tol` of their limits.
int limit_half_length(const ModelParams& p, int lo, int hi, double tol);

enum class ObservableKind { density1, spin1, density2, spin2, electron2, truncated };
enum class Source { analytic, oracle };

std::string to_string(ObservableKind k);
std::string to_string(Source s);

struct ProfileEntry {
  Site x;
  std::optional<Site> y;
  cplx value;
};

struct ObservableProfile {
  ObservableKind kind = ObservableKind::density1;
  int j = 0;
  int k = 0;
  Spin sigma = Spin::up;
  Spin tau = Spin::up;
  ModelParams params;
  Source source = Source::analytic;
  std::vector<ProfileEntry> entries;

  /// Value at a site or pair; throws if absent.
  cplx at(Site x, std::optional<Site> y = std::nullopt) const;
};

ObservableProfile density_profile(const GroundState& g, const std::vector<Site>& sites);
ObservableProfile spin_profile(const GroundState& g, int j, const std::vector<Site>& sites);
ObservableProfile electron_profile(const GroundState& g, Spin s, Spin t, const std::vector<std::pair<Site, Site>>& pairs);
ObservableProfile density_pair_profile(const GroundState& g, const std::vector<std::pair<Site, Site>>& pairs);
ObservableProfile spin_pair_profile(const GroundState& g, int j, int k, const std::vector<std::pair<Site, Site>>& pairs);

/// Least-squares line through (separation, ln|value|): value ~ exp(intercept - rate * d).
struct DecayFit {
  double rate = 0;
  double intercept = 0;
  double residual = 0;  // RMS of the log residuals
  double window_lo = 0;
  double window_hi = 0;
  int points = 0;

  double length() const { return 1.0 / rate; }
};

DecayFit fit_decay(const std::vector<std::pair<double, double>>& separation_value);

struct TruncatedResult {
  ObservableProfile profile;
  DecayFit fit;
};

/// Pointwise <AB> - <A><B> over the pairs of `two_point`, one-point values
/// from `one_point`. Pairs touching the five sites nearest the wall center
/// and coincident pairs are excluded from the fit.
TruncatedResult truncated_correlation(const ObservableProfile& two_point, const ObservableProfile& one_point,
                                      double wall_center);

/// Same, but computed from the cancellation-free density expression.
TruncatedResult truncated_density_scan(const GroundState& g, Site x, const std::vector<Site>& ys);

/// One-sided decay of n/2 - |S3| on integer sites d_min <= |x - z| <= d_max.
/// Each side decays at 2 log|q|, so the two lengths add up to 1/log|q|.
struct WallFit {
  DecayFit left;
  DecayFit right;

  double width() const { return left.length() + right.length(); }
};

WallFit fit_domain_wall(const GroundState& g, int d_min = 6, int d_max = 24);

struct SymmetryReport {
  Site site;
  double phi = 0;
  int u = 0;
  double s1 = 0, s2 = 0, s3 = 0;
  double s1_rotated = 0;           // omega(U_phi(S1))
  double s3_reflected = 0;         // omega(Pi(S3_x)) = -omega(S3_{-x})
  double s3_translated = 0;        // omega(T_u(S3_x)) = omega(S3_{x+u})
  double translation_covariance = 0;  // max |S3(x+u; z) - S3(x; z-u)| over the window
  double all_up_max_transverse = 0;   // max |S1|, |S2| in the all-up state
  double all_up_max_s3_gap = 0;       // max |S3 - n/2| in the all-up state
};

/// Evaluated in the infinite-volume mode around the wall when l = 0, else on L = 2l+1.
SymmetryReport symmetry_breaking_report(const ModelParams& p, int l = 0, double phi = 3.141592653589793, int u = 5);

}  // namespace flatband
