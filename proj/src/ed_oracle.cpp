// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/ed_oracle.hpp"

#include <bit>
#include <cmath>

#include "flatband/error.hpp"
#include "flatband/krylov.hpp"

namespace flatband {

cplx q_power(const ModelParams& p, double a) { return std::polar(std::pow(p.q_abs, a), p.theta * a); }

namespace {

std::size_t site_pos(Site s, const Lattice& lat) { return static_cast<std::size_t>(s.half_units + lat.L); }

}  // namespace

Eigen::MatrixXcd hopping_matrix(const ModelParams& p, const Lattice& lat, Spin s) {
  const auto n = static_cast<Eigen::Index>(lat.size());
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
  const double ps = spin_sign(s);
  const double diag_o = std::sqrt(p.q_abs) + 1.0 / std::sqrt(p.q_abs);
  for (Site x : lat.sites) {
    const auto i = static_cast<Eigen::Index>(site_pos(x, lat));
    if (!x.on_integer()) {
      t(i, i) = p.lambda * p.lambda;
      continue;
    }
    t(i, i) = diag_o;
    const auto up = i + 1;  // x + 1/2
    const auto dn = i - 1;  // x - 1/2
    t(up, i) = p.lambda * q_power(p, -ps / 4);
    t(i, up) = std::conj(t(up, i));
    t(dn, i) = p.lambda * q_power(p, ps / 4);
    t(i, dn) = std::conj(t(dn, i));
    if (x.half_units + 2 <= lat.L) {
      const auto nx = i + 2;
      t(i, nx) = std::polar(1.0, p.theta * ps / 2);
      t(nx, i) = std::conj(t(i, nx));
    }
  }
  return p.t * t;
}

Eigen::SparseMatrix<cplx> build_hamiltonian(const ModelParams& p, const Lattice& lat, const Sector& s) {
  if (s.L != lat.L) throw InvalidArgument("sector and lattice disagree on L");
  if (s.dim() == 0) throw InvalidArgument("empty sector");
  struct Link {
    int to, from;
    cplx amp;
  };
  std::vector<Link> links;
  for (Spin sp : {Spin::up, Spin::down}) {
    const auto t = hopping_matrix(p, lat, sp);
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j)
        if (t(i, j) != cplx(0.0))
          links.push_back({2 * static_cast<int>(i) + static_cast<int>(sp), 2 * static_cast<int>(j) + static_cast<int>(sp),
                           t(i, j)});
  }
  constexpr Occupation up_mask = 0x5555555555555555ULL;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(s.dim() * 24);
  for (std::size_t col = 0; col < s.dim(); ++col) {
    const Occupation occ0 = s.basis[col];
    const Occupation doubles = occ0 & (occ0 >> 1) & up_mask;
    double diag = p.U * std::popcount(doubles);
    for (const auto& lk : links) {
      Occupation occ = occ0;
      int sign = apply_ladder({lk.from, false}, occ);
      if (sign == 0) continue;
      sign *= apply_ladder({lk.to, true}, occ);
      if (sign == 0) continue;
      if (occ == occ0) {
        diag += lk.amp.real();
        continue;
      }
      const auto row = s.index_of(occ);
      trip.emplace_back(static_cast<int>(row), static_cast<int>(col), static_cast<double>(sign) * lk.amp);
    }
    trip.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
  }
  const auto n = static_cast<Eigen::Index>(s.dim());
  Eigen::SparseMatrix<cplx> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

OperatorSum a_dagger(const ModelParams& p, Site x, Spin s, const Lattice& lat) {
  if (!lat.contains(x)) throw InvalidArgument("a_dagger: site outside lattice");
  const int L = lat.L;
  if (!x.on_integer()) {
    if (p.lambda == 0.0) throw InvalidArgument("a_dagger on a half-odd site needs lambda > 0");
    return (1.0 / p.lambda) * op::create({x, s}, L);
  }
  const double ps = spin_sign(s);
  OperatorSum out = p.lambda * op::create({x, s}, L);
  out += (-q_power(p, ps / 4)) * op::create({Site::half(x.half_units - 1), s}, L);
  out += (-q_power(p, -ps / 4)) * op::create({Site::half(x.half_units + 1), s}, L);
  return out;
}

OperatorSum d_op(const ModelParams& p, Site x, Spin s, const Lattice& lat) {
  if (!lat.contains(x)) throw InvalidArgument("d_op: site outside lattice");
  const int L = lat.L;
  if (x.on_integer()) {
    if (p.lambda == 0.0) throw InvalidArgument("d_op on an integer site needs lambda > 0");
    return (1.0 / p.lambda) * op::annihilate({x, s}, L);
  }
  const double ps = spin_sign(s);
  OperatorSum out = p.lambda * op::annihilate({x, s}, L);
  const Site left = Site::half(x.half_units - 1), right = Site::half(x.half_units + 1);
  if (lat.contains(left)) out += q_power(p, -ps / 4) * op::annihilate({left, s}, L);
  if (lat.contains(right)) out += q_power(p, ps / 4) * op::annihilate({right, s}, L);
  return out;
}

OperatorSum alpha_dagger(const ModelParams& p, int x, const Lattice& lat) {
  const Site site = Site::integer(x);
  return a_dagger(p, site, Spin::up, lat) + (p.zeta() * q_power(p, x)) * a_dagger(p, site, Spin::down, lat);
}

OperatorSum hamiltonian_dual_form(const ModelParams& p, const Lattice& lat) {
  OperatorSum h;
  for (Site x : lat.half_sites())
    for (Spin s : {Spin::up, Spin::down}) {
      const auto d = d_op(p, x, s, lat);
      h += p.t * (d.adjoint() * d);
    }
  for (Site x : lat.sites) h += p.U * (op::number(x, Spin::up, lat.L) * op::number(x, Spin::down, lat.L));
  return h;
}

FockVector construct_psi(const ModelParams& p, const Lattice& lat) {
  FockVector psi = FockVector::vacuum();
  for (int x = lat.l; x >= -lat.l; --x) {
    psi = apply(alpha_dagger(p, x, lat), psi);
    psi.prune();
  }
  if (psi.norm2() == 0.0) throw NumericalFailure("construct_psi produced the zero vector");
  return psi;
}

Eigen::MatrixXcd gram_matrix(int x, int y, const ModelParams& p) {
  if (y < x) throw InvalidArgument("gram_matrix requires x <= y");
  const int n = y - x + 1;
  // Orbitals of the window: half-units 2x-1 ... 2y+1, two spins each.
  const int span = 2 * (y - x) + 3;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2 * span, n);
  auto idx = [&](int half_units, Spin s) { return 2 * (half_units - (2 * x - 1)) + static_cast<int>(s); };
  const cplx zeta = p.zeta();
  for (int k = 0; k < n; ++k) {
    const int w = x + k;
    const cplx zw = zeta * q_power(p, w);
    const cplx qa = q_power(p, 0.25), qb = q_power(p, -0.25);
    v(idx(2 * w - 1, Spin::up), k) = -qa;
    v(idx(2 * w, Spin::up), k) = p.lambda;
    v(idx(2 * w + 1, Spin::up), k) = -qb;
    v(idx(2 * w - 1, Spin::down), k) = -zw * qb;
    v(idx(2 * w, Spin::down), k) = p.lambda * zw;
    v(idx(2 * w + 1, Spin::down), k) = -zw * qa;
  }
  return v.adjoint() * v;
}

double gram_log_det(int x, int y, const ModelParams& p) {
  const Eigen::MatrixXcd g = gram_matrix(x, y, p);
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalFailure("Gram matrix is not positive definite");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) acc += std::log(std::real(llt.matrixL()(i, i)));
  return 2.0 * acc;
}

cplx expectation(const OperatorSum& o, const FockVector& psi) {
  const double n2 = psi.norm2();
  if (!(n2 > 0)) throw InvalidArgument("expectation of the zero vector");
  return inner(psi, apply(o, psi)) / n2;
}

namespace {

constexpr std::size_t kDenseLimit = 1200;

KernelResult dense_kernel(const Eigen::SparseMatrix<cplx>& h) {
  const Eigen::MatrixXcd dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) throw NumericalFailure("dense eigensolver failed");
  KernelResult out;
  const auto& ev = es.eigenvalues();
  out.info.norm_estimate = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  out.info.lowest = ev[0];
  out.info.method = "dense";
  const double thr = 1e-10 * out.info.norm_estimate;
  int k = 0;
  while (k < ev.size() && ev[k] <= thr) ++k;
  out.info.kernel_dim = k;
  out.info.first_nonzero = k < ev.size() ? ev[k] : 0.0;
  out.basis = es.eigenvectors().leftCols(k);
  return out;
}

KernelResult krylov_kernel(const Eigen::SparseMatrix<cplx>& h) {
  for (int want = 4;; want *= 2) {
    const auto low = block_lanczos_lowest(h, want, 4, 1e-9, 3000);
    if (!low.converged) throw NumericalFailure("block Lanczos did not converge");
    KernelResult out;
    out.info.norm_estimate = low.top;
    out.info.lowest = low.values[0];
    out.info.method = "block-lanczos";
    const double thr = 1e-10 * low.top;
    int k = 0;
    while (k < low.values.size() && low.values[k] <= thr) ++k;
    if (k == want && want < h.rows()) continue;
    out.info.kernel_dim = k;
    out.info.first_nonzero = k < low.values.size() ? low.values[k] : 0.0;
    out.basis = low.vectors.leftCols(k);
    return out;
  }
}

}  // namespace

KernelResult sector_kernel(const ModelParams& p, const Lattice& lat, const Sector& s) {
  const auto h = build_hamiltonian(p, lat, s);
  KernelResult out = s.dim() <= kDenseLimit ? dense_kernel(h) : krylov_kernel(h);
  out.info.dim = s.dim();
  out.info.two_m = s.two_m.value_or(0);
  return out;
}

GroundSpaceReport ground_space_analysis(const ModelParams& p, int L, int N) {
  const Lattice lat = build_lattice(L);
  GroundSpaceReport rep{L, N, {}, 0};
  for (int two_m = -N; two_m <= N; two_m += 2) {
    const Sector s = make_sector(L, N, two_m);
    if (s.dim() == 0) continue;
    rep.sectors.push_back(sector_kernel(p, lat, s).info);
    rep.total += rep.sectors.back().kernel_dim;
  }
  return rep;
}

namespace {

SpinOrbital map_orbital(const SymmetryKind& k, SpinOrbital o, const Lattice& lat) {
  if (std::holds_alternative<Z2>(k)) return {Site::half(-o.site.half_units), flip(o.spin)};
  if (const auto* t = std::get_if<Translate>(&k)) {
    const Site moved = Site::half(o.site.half_units + 2 * t->u);
    if (!lat.contains(moved)) throw InvalidArgument("translation moves an orbital past the boundary");
    return {moved, o.spin};
  }
  return o;
}

}  // namespace

OperatorSum symmetry_transform(const SymmetryKind& k, const OperatorSum& o, const Lattice& lat) {
  OperatorSum out = o;
  for (auto& term : out.terms) {
    for (auto& f : term.factors) {
      const SpinOrbital orb = orbital_at(f.orbital, lat.L);
      if (const auto* u = std::get_if<U1>(&k)) {
        const double ph = 0.5 * u->phi * spin_sign(orb.spin);
        term.coeff *= std::polar(1.0, f.dagger ? ph : -ph);
      } else {
        f.orbital = orbital_index(map_orbital(k, orb, lat), lat.L);
      }
    }
  }
  return out;
}

FockVector symmetry_transform(const SymmetryKind& k, const FockVector& v, const Lattice& lat) {
  FockVector out;
  for (const auto& [occ, amp] : v.amplitudes()) {
    if (const auto* u = std::get_if<U1>(&k)) {
      out.add(occ, amp * std::polar(1.0, 0.5 * u->phi * two_magnetization(occ)));
      continue;
    }
    // c^dag_{pi(i1)} ... c^dag_{pi(ik)} |0>, i1 < ... < ik, rightmost applied first.
    std::vector<int> occupied;
    for (int i = 0; i < orbital_count(lat.L); ++i)
      if (occ >> i & 1) occupied.push_back(i);
    Occupation target = 0;
    int sign = 1;
    for (auto it = occupied.rbegin(); it != occupied.rend(); ++it) {
      const int mapped = orbital_index(map_orbital(k, orbital_at(*it, lat.L), lat), lat.L);
      sign *= apply_ladder({mapped, true}, target);
    }
    out.add(target, static_cast<double>(sign) * amp);
  }
  return out;
}

}  // namespace flatband
