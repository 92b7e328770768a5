// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/fock.hpp"

#include <algorithm>
#include <bit>

#include "flatband/error.hpp"

namespace flatband {

int orbital_count(int L) { return 2 * (2 * L + 1); }

int orbital_index(SpinOrbital o, int L) {
  if (o.site.half_units < -L || o.site.half_units > L)
    throw InvalidArgument("orbital site " + to_string(o.site) + " outside the lattice");
  return 2 * (o.site.half_units + L) + static_cast<int>(o.spin);
}

SpinOrbital orbital_at(int index, int L) {
  if (index < 0 || index >= orbital_count(L)) throw InvalidArgument("orbital index out of range");
  return {Site::half(index / 2 - L), static_cast<Spin>(index % 2)};
}

OperatorSum OperatorSum::adjoint() const {
  OperatorSum out;
  out.terms.reserve(terms.size());
  for (const auto& t : terms) {
    OperatorTerm a{std::conj(t.coeff), {}};
    a.factors.assign(t.factors.rbegin(), t.factors.rend());
    for (auto& f : a.factors) f.dagger = !f.dagger;
    out.terms.push_back(std::move(a));
  }
  return out;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

OperatorSum& OperatorSum::operator*=(cplx a) {
  for (auto& t : terms) t.coeff *= a;
  return *this;
}

OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a += -1.0 * b; }
OperatorSum operator*(cplx a, OperatorSum b) { return b *= a; }

OperatorSum operator*(const OperatorSum& a, const OperatorSum& b) {
  OperatorSum out;
  out.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      OperatorTerm t{ta.coeff * tb.coeff, ta.factors};
      t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
      out.terms.push_back(std::move(t));
    }
  return out;
}

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) { return a * b - b * a; }
OperatorSum anticommutator(const OperatorSum& a, const OperatorSum& b) { return a * b + b * a; }

namespace op {

OperatorSum create(SpinOrbital o, int L) { return {{{1.0, {{orbital_index(o, L), true}}}}}; }
OperatorSum annihilate(SpinOrbital o, int L) { return {{{1.0, {{orbital_index(o, L), false}}}}}; }

OperatorSum hop(Site x, Spin s, Site y, Spin t, int L) {
  return {{{1.0, {{orbital_index({x, s}, L), true}, {orbital_index({y, t}, L), false}}}}};
}

OperatorSum number(Site x, Spin s, int L) { return hop(x, s, x, s, L); }
OperatorSum number(Site x, int L) { return number(x, Spin::up, L) + number(x, Spin::down, L); }

OperatorSum spin(Site x, int j, int L) {
  const cplx I(0.0, 1.0);
  switch (j) {
    case 1:
      return 0.5 * (hop(x, Spin::up, x, Spin::down, L) + hop(x, Spin::down, x, Spin::up, L));
    case 2:
      return 0.5 * ((-I) * hop(x, Spin::up, x, Spin::down, L) + I * hop(x, Spin::down, x, Spin::up, L));
    case 3:
      return 0.5 * (number(x, Spin::up, L) - number(x, Spin::down, L));
    default:
      throw InvalidArgument("spin component must be 1, 2 or 3");
  }
}

OperatorSum spin_total(int j, const Lattice& lat) {
  OperatorSum out;
  for (Site s : lat.sites) out += spin(s, j, lat.L);
  return out;
}

OperatorSum number_total(const Lattice& lat) {
  OperatorSum out;
  for (Site s : lat.sites) out += number(s, lat.L);
  return out;
}

}  // namespace op

FockVector FockVector::vacuum() { return basis(0); }

FockVector FockVector::basis(Occupation occ, cplx amp) {
  FockVector v;
  v.amp_[occ] = amp;
  return v;
}

void FockVector::add(Occupation occ, cplx a) { amp_[occ] += a; }

void FockVector::prune(double tol) {
  std::erase_if(amp_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

double FockVector::norm2() const {
  double acc = 0.0;
  for (const auto& [k, a] : amp_) acc += std::norm(a);
  return acc;
}

FockVector& FockVector::operator+=(const FockVector& o) {
  for (const auto& [k, a] : o.amp_) amp_[k] += a;
  return *this;
}

FockVector& FockVector::operator*=(cplx a) {
  for (auto& [k, v] : amp_) v *= a;
  return *this;
}

cplx inner(const FockVector& a, const FockVector& b) {
  const auto& small = a.size() <= b.size() ? a.amplitudes() : b.amplitudes();
  const auto& large = a.size() <= b.size() ? b.amplitudes() : a.amplitudes();
  cplx acc = 0.0;
  for (const auto& [k, v] : small) {
    auto it = large.find(k);
    if (it == large.end()) continue;
    acc += (&small == &a.amplitudes()) ? std::conj(v) * it->second : std::conj(it->second) * v;
  }
  return acc;
}

int apply_ladder(Ladder f, Occupation& occ) {
  const Occupation bit = Occupation{1} << f.orbital;
  const bool occupied = (occ & bit) != 0;
  if (occupied == f.dagger) return 0;
  const int below = std::popcount(occ & (bit - 1));
  occ ^= bit;
  return (below & 1) ? -1 : 1;
}

FockVector apply(const OperatorSum& o, const FockVector& v) {
  FockVector out;
  for (const auto& t : o.terms) {
    for (const auto& [occ0, amp] : v.amplitudes()) {
      Occupation occ = occ0;
      int sign = 1;
      for (auto it = t.factors.rbegin(); it != t.factors.rend() && sign != 0; ++it) sign *= apply_ladder(*it, occ);
      if (sign != 0) out.add(occ, static_cast<double>(sign) * t.coeff * amp);
    }
  }
  return out;
}

int two_magnetization(Occupation occ) {
  constexpr Occupation up_mask = 0x5555555555555555ULL;
  return std::popcount(occ & up_mask) - std::popcount(occ & ~up_mask);
}

std::ptrdiff_t Sector::index_of(Occupation occ) const {
  auto it = std::lower_bound(basis.begin(), basis.end(), occ);
  if (it == basis.end() || *it != occ) return -1;
  return it - basis.begin();
}

namespace {

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

}  // namespace

Sector make_sector(int L, int N, std::optional<int> two_m) {
  const int n_orb = orbital_count(L);
  if (n_orb > kMaxOrbitals) throw InvalidArgument("lattice too large for 64-bit occupations");
  if (N < 0 || N > n_orb) throw InvalidArgument("electron count out of range");
  if (binomial(n_orb, N) > static_cast<double>(kMaxSectorDim))
    throw InvalidArgument("sector dimension exceeds the guard of 5e6 states");
  Sector s{L, N, two_m, {}};
  if (N == 0) {
    if (!two_m || *two_m == 0) s.basis.push_back(0);
    return s;
  }
  // Gosper's hack walks all N-subsets in increasing numeric order.
  const Occupation limit = Occupation{1} << n_orb;
  for (Occupation occ = (Occupation{1} << N) - 1; occ < limit;) {
    if (!two_m || two_magnetization(occ) == *two_m) s.basis.push_back(occ);
    const Occupation c = occ & (~occ + 1);
    const Occupation r = occ + c;
    occ = (((r ^ occ) >> 2) / c) | r;
  }
  return s;
}

Eigen::VectorXcd to_dense(const FockVector& v, const Sector& s) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dim()));
  for (const auto& [occ, a] : v.amplitudes()) {
    if (a == cplx(0.0)) continue;
    const auto i = s.index_of(occ);
    if (i < 0) throw InvalidArgument("vector has weight outside the sector");
    out[i] = a;
  }
  return out;
}

FockVector from_dense(const Eigen::VectorXcd& v, const Sector& s) {
  FockVector out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != cplx(0.0)) out.add(s.basis[static_cast<std::size_t>(i)], v[i]);
  return out;
}

Eigen::SparseMatrix<cplx> to_matrix(const OperatorSum& o, const Sector& s) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t col = 0; col < s.dim(); ++col) {
    for (const auto& t : o.terms) {
      Occupation occ = s.basis[col];
      int sign = 1;
      for (auto it = t.factors.rbegin(); it != t.factors.rend() && sign != 0; ++it) sign *= apply_ladder(*it, occ);
      if (sign == 0) continue;
      const auto row = s.index_of(occ);
      if (row < 0) throw InvalidArgument("operator leaks out of the sector");
      trip.emplace_back(static_cast<int>(row), static_cast<int>(col), static_cast<double>(sign) * t.coeff);
    }
  }
  const auto n = static_cast<Eigen::Index>(s.dim());
  Eigen::SparseMatrix<cplx> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace flatband
