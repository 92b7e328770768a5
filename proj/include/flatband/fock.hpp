// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// Fermionic Fock space on the decorated chain. Spin orbitals are ordered by
// (site, spin) with up before down; that order fixes every sign.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "flatband/model.hpp"

namespace flatband {

enum class Spin : int { up = 0, down = 1 };

inline Spin flip(Spin s) { return s == Spin::up ? Spin::down : Spin::up; }
/// p(sigma): +1 for up, -1 for down.
inline int spin_sign(Spin s) { return s == Spin::up ? 1 : -1; }

struct SpinOrbital {
  Site site;
  Spin spin = Spin::up;
};

using Occupation = std::uint64_t;

inline constexpr int kMaxOrbitals = 64;

int orbital_count(int L);
int orbital_index(SpinOrbital o, int L);
SpinOrbital orbital_at(int index, int L);

struct Ladder {
  int orbital = 0;
  bool dagger = false;
};

/// coeff * f_1 f_2 ... f_k, with f_k acting first.
struct OperatorTerm {
  cplx coeff{1.0, 0.0};
  std::vector<Ladder> factors;
};

struct OperatorSum {
  std::vector<OperatorTerm> terms;

  OperatorSum adjoint() const;
  OperatorSum& operator+=(const OperatorSum& o);
  OperatorSum& operator*=(cplx a);
};

OperatorSum operator+(OperatorSum a, const OperatorSum& b);
OperatorSum operator-(OperatorSum a, const OperatorSum& b);
OperatorSum operator*(cplx a, OperatorSum b);
OperatorSum operator*(const OperatorSum& a, const OperatorSum& b);
/// AB - BA
OperatorSum commutator(const OperatorSum& a, const OperatorSum& b);
/// AB + BA
OperatorSum anticommutator(const OperatorSum& a, const OperatorSum& b);

namespace op {

OperatorSum create(SpinOrbital o, int L);
OperatorSum annihilate(SpinOrbital o, int L);
OperatorSum number(Site x, Spin s, int L);
OperatorSum number(Site x, int L);
/// S^(j)_x = (1/2) sum c^dag_{x s} P^j_{s t} c_{x t}
OperatorSum spin(Site x, int j, int L);
/// c^dag_{x s} c_{y t}
OperatorSum hop(Site x, Spin s, Site y, Spin t, int L);
OperatorSum spin_total(int j, const Lattice& lat);
OperatorSum number_total(const Lattice& lat);

}  // namespace op

/// Sparse amplitude map over occupation bitsets.
class FockVector {
 public:
  using Map = std::unordered_map<Occupation, cplx>;

  FockVector() = default;
  static FockVector vacuum();
  static FockVector basis(Occupation occ, cplx amp = 1.0);

  const Map& amplitudes() const { return amp_; }
  std::size_t size() const { return amp_.size(); }
  void add(Occupation occ, cplx a);
  void prune(double tol = 0.0);
  double norm2() const;
  FockVector& operator+=(const FockVector& o);
  FockVector& operator*=(cplx a);

 private:
  Map amp_;
};

cplx inner(const FockVector& a, const FockVector& b);  // <a|b>
FockVector apply(const OperatorSum& o, const FockVector& v);

/// Returns the sign picked up (0 if annihilated) and updates occ in place.
int apply_ladder(Ladder f, Occupation& occ);

/// Fixed-N (and optionally fixed 2M) basis, sorted ascending.
struct Sector {
  int L = 0;
  int N = 0;
  std::optional<int> two_m;
  std::vector<Occupation> basis;

  std::size_t dim() const { return basis.size(); }
  /// -1 when absent.
  std::ptrdiff_t index_of(Occupation occ) const;
};

inline constexpr std::size_t kMaxSectorDim = 5'000'000;

Sector make_sector(int L, int N, std::optional<int> two_m = std::nullopt);

Eigen::VectorXcd to_dense(const FockVector& v, const Sector& s);
FockVector from_dense(const Eigen::VectorXcd& v, const Sector& s);

/// Matrix of a number-conserving operator within a sector; leakage out of the sector throws.
Eigen::SparseMatrix<cplx> to_matrix(const OperatorSum& o, const Sector& s);

/// Two-spin magnetization 2M of an occupation.
int two_magnetization(Occupation occ);

}  // namespace flatband
