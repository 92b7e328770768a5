// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// Formula-free ground truth on small lattices: fermionic H, the product state
// Psi(zeta), Gram determinants and symmetry maps. Nothing here reads normfunc.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <variant>
#include <vector>

#include "flatband/fock.hpp"
#include "flatband/model.hpp"

namespace flatband {

/// q^a on the principal branch: |q|^a e^{i theta a}.
cplx q_power(const ModelParams& p, double a);

/// t^(sigma) indexed by position in lat.sites.
Eigen::MatrixXcd hopping_matrix(const ModelParams& p, const Lattice& lat, Spin s);

/// H = sum t_{xy} c^dag c + U sum n_up n_down, assembled from hopping_matrix.
Eigen::SparseMatrix<cplx> build_hamiltonian(const ModelParams& p, const Lattice& lat, const Sector& s);

/// Localized operators as ladder strings.
OperatorSum a_dagger(const ModelParams& p, Site x, Spin s, const Lattice& lat);
OperatorSum d_op(const ModelParams& p, Site x, Spin s, const Lattice& lat);
/// alpha^dag_x(zeta) = a^dag_{x up} + zeta q^x a^dag_{x down}, x integer.
OperatorSum alpha_dagger(const ModelParams& p, int x, const Lattice& lat);

/// t sum_{x in Lambda'} d^dag d + U sum n_up n_down.
OperatorSum hamiltonian_dual_form(const ModelParams& p, const Lattice& lat);

/// prod_{x=-l}^{l} alpha^dag_x applied to the vacuum (leftmost site acts last).
FockVector construct_psi(const ModelParams& p, const Lattice& lat);

/// Overlap matrix G_ij = <v_i, v_j> of the one-particle vectors of alpha^dag_x..alpha^dag_y.
Eigen::MatrixXcd gram_matrix(int x, int y, const ModelParams& p);
/// ln det G via Cholesky; throws NumericalFailure if G is not positive definite.
double gram_log_det(int x, int y, const ModelParams& p);

/// Expectation <psi|O|psi>/<psi|psi>.
cplx expectation(const OperatorSum& o, const FockVector& psi);

struct KernelSector {
  int two_m = 0;
  std::size_t dim = 0;
  int kernel_dim = 0;
  double lowest = 0;        // smallest computed eigenvalue
  double first_nonzero = 0; // smallest eigenvalue above threshold
  double norm_estimate = 0;
  std::string method;
};

struct GroundSpaceReport {
  int L = 0;
  int N = 0;
  std::vector<KernelSector> sectors;
  int total = 0;
};

GroundSpaceReport ground_space_analysis(const ModelParams& p, int L, int N);

/// Kernel of H restricted to a sector: dimension plus an orthonormal basis.
struct KernelResult {
  KernelSector info;
  Eigen::MatrixXcd basis;
};
KernelResult sector_kernel(const ModelParams& p, const Lattice& lat, const Sector& s);

struct U1 {
  double phi = 0;
};
struct Z2 {};
struct Translate {
  int u = 0;
};
using SymmetryKind = std::variant<U1, Z2, Translate>;

/// X(O) for the operator maps; orbitals leaving the lattice throw.
OperatorSum symmetry_transform(const SymmetryKind& k, const OperatorSum& o, const Lattice& lat);
/// The implementing unitary applied to a state.
FockVector symmetry_transform(const SymmetryKind& k, const FockVector& v, const Lattice& lat);

}  // namespace flatband
