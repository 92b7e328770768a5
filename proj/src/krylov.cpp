// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/krylov.hpp"

#include <random>

#include "flatband/error.hpp"

namespace flatband {

namespace {

Eigen::MatrixXcd random_block(Eigen::Index n, int b, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Two passes of classical Gram-Schmidt against the first `cols` columns of v.
void project_out(const Eigen::MatrixXcd& v, Eigen::Index cols, Eigen::MatrixXcd& w) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) w.noalias() -= v.leftCols(cols) * (v.leftCols(cols).adjoint() * w);
}

}  // namespace

LowSpectrum block_lanczos_lowest(const Eigen::SparseMatrix<cplx>& h, int count, int block, double rel_residual,
                                 int max_basis) {
  const Eigen::Index n = h.rows();
  if (n == 0 || h.cols() != n) throw InvalidArgument("block_lanczos_lowest: square nonempty matrix required");
  if (count < 1 || block < 1) throw InvalidArgument("block_lanczos_lowest: count and block must be positive");
  const Eigen::Index cap = std::min<Eigen::Index>(n, max_basis);
  std::mt19937_64 rng(0x5eed);

  Eigen::MatrixXcd v(n, cap + block);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(cap + block, cap + block);
  {
    Eigen::MatrixXcd q0 = random_block(n, block, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q0);
    v.leftCols(block) = qr.householderQ() * Eigen::MatrixXcd::Identity(n, block);
  }

  LowSpectrum out;
  Eigen::Index m = block;  // columns of v in use
  Eigen::Index last_check = 0;
  for (;;) {
    const Eigen::Index j0 = m - block;
    Eigen::MatrixXcd w = h * v.middleCols(j0, block);
    t.block(j0, j0, block, block) = v.middleCols(j0, block).adjoint() * w;
    const Eigen::MatrixXcd a = t.block(j0, j0, block, block);
    t.block(j0, j0, block, block) = 0.5 * (a + a.adjoint());
    project_out(v, m, w);

    bool full = m + block > cap;
    Eigen::MatrixXcd bnext = Eigen::MatrixXcd::Zero(block, block);
    if (!full) {
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
      bnext = qr.matrixQR().topRows(block).triangularView<Eigen::Upper>();
      const double scale = std::max(1.0, t.topLeftCorner(m, m).cwiseAbs().maxCoeff());
      bool breakdown = false;
      for (int i = 0; i < block; ++i) breakdown |= std::abs(bnext(i, i)) < 1e-13 * scale;
      if (breakdown) {
        // (Near-)invariant subspace: the current basis already carries the answer.
        full = true;
        bnext.setZero();
      } else {
        v.middleCols(m, block) = qr.householderQ() * Eigen::MatrixXcd::Identity(n, block);
        t.block(m, j0, block, block) = bnext;
        t.block(j0, m, block, block) = bnext.adjoint();
      }
    }

    const bool check = full || m - last_check >= 10 * block;
    if (check) {
      last_check = m;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.topLeftCorner(m, m));
      const auto& theta = es.eigenvalues();
      out.top = std::max(out.top, std::abs(theta[m - 1]));
      const int k = static_cast<int>(std::min<Eigen::Index>(count, m));
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        const double est = (bnext * es.eigenvectors().block(j0, i, block, 1)).norm();
        ok = est <= rel_residual * out.top;
      }
      if (ok || full) {
        out.values = theta.head(k);
        out.vectors = v.leftCols(m) * es.eigenvectors().leftCols(k);
        out.residuals.resize(k);
        for (int i = 0; i < k; ++i) {
          out.vectors.col(i).normalize();
          out.residuals[i] = (h * out.vectors.col(i) - theta[i] * out.vectors.col(i)).norm();
        }
        out.basis_size = static_cast<int>(m);
        out.converged = out.residuals.maxCoeff() <= 10 * rel_residual * out.top || m == n;
        return out;
      }
    }
    m += block;
  }
}

}  // namespace flatband
