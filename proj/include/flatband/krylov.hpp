// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "flatband/model.hpp"

namespace flatband {

struct LowSpectrum {
  Eigen::VectorXd values;     // ascending Ritz values
  Eigen::MatrixXcd vectors;   // matching Ritz vectors
  Eigen::VectorXd residuals;  // ||H v - theta v||
  double top = 0;             // largest Ritz value seen, a lower bound on ||H||
  int basis_size = 0;
  bool converged = false;
};

/// Lowest `count` eigenpairs of a Hermitian sparse matrix by block Lanczos
/// with full reorthogonalization. Deterministic (fixed seed).
LowSpectrum block_lanczos_lowest(const Eigen::SparseMatrix<cplx>& h, int count, int block = 4,
                                 double rel_residual = 1e-9, int max_basis = 1500);

}  // namespace flatband
