#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>

namespace lexprop {

struct SvdOptions {
  int oversampling = 10;
  int min_power_iterations = 4;
  int max_power_iterations = 300;
  // Stop once max_i ||A v_i - s_i u_i|| <= tolerance * s_1 over the kept triplets.
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

struct TruncatedSvd {
  Eigen::MatrixXd U;  // rows x rank, orthonormal columns
  Eigen::VectorXd S;  // descending
  Eigen::MatrixXd V;  // cols x rank, orthonormal columns
  int iterations = 0;
  double residual = 0.0;  // relative, as in SvdOptions::tolerance
};

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Rank-`rank` SVD by randomized subspace iteration. A Gaussian test block of
// width rank + oversampling is multiplied alternately by A^T and A, with
// two-pass Gram-Schmidt after every product. A Rayleigh-Ritz step extracts
// the triplets. Each column of U is flipped so that its
// largest-magnitude entry is positive (V follows). Throws ConvergenceError
// with the final residual when max_power_iterations is reached.
TruncatedSvd randomized_svd(const SparseRowMatrix& a, int rank, const SvdOptions& opts = {});

// In-place two-pass classical Gram-Schmidt. Columns that collapse to zero
// are replaced by fresh random directions drawn from `seed`.
void orthonormalize_columns(Eigen::MatrixXd& q, std::uint64_t seed = 0);

}  // namespace lexprop
