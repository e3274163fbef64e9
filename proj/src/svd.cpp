#include "lexprop/svd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexprop/error.hpp"
#include "lexprop/rng.hpp"

namespace lexprop {
namespace {

void fill_gaussian(Eigen::MatrixXd& m, Rng& rng) {
  // column-major fill order is part of the reproducibility contract
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.normal();
  }
}

void fix_signs(TruncatedSvd& out) {
  for (Eigen::Index c = 0; c < out.U.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < out.U.rows(); ++r) {
      const double v = std::fabs(out.U(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (out.U(best, c) < 0.0) {
      out.U.col(c) *= -1.0;
      out.V.col(c) *= -1.0;
    }
  }
}

}  // namespace

void orthonormalize_columns(Eigen::MatrixXd& q, std::uint64_t seed) {
  const Eigen::Index n = q.rows();
  Rng rng(seed, 0x6f7274686fULL);
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      const double before = q.col(j).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (j > 0) {
          const Eigen::VectorXd coeffs = q.leftCols(j).transpose() * q.col(j);
          q.col(j).noalias() -= q.leftCols(j) * coeffs;
        }
      }
      const double after = q.col(j).norm();
      if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
        q.col(j) /= after;
        break;
      }
      if (attempt > 8 || j >= n) throw ConvergenceError("orthonormalization: rank collapse", after);
      for (Eigen::Index r = 0; r < n; ++r) q(r, j) = rng.normal();
    }
  }
}

TruncatedSvd randomized_svd(const SparseRowMatrix& a, int rank, const SvdOptions& opts) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index min_dim = std::min(m, n);
  if (rank < 1 || rank > min_dim) {
    throw UsageError("svd rank " + std::to_string(rank) + " outside [1, " + std::to_string(min_dim) + "]");
  }
  if (a.nonZeros() == 0) throw DataError("svd of an empty matrix");
  const Eigen::Index width = std::min<Eigen::Index>(rank + std::max(opts.oversampling, 0), min_dim);

  Rng rng(opts.seed);
  Eigen::MatrixXd omega(n, width);
  fill_gaussian(omega, rng);
  std::uint64_t ortho_seed = opts.seed * 31 + 7;

  Eigen::MatrixXd q = a * omega;
  orthonormalize_columns(q, ortho_seed++);

  TruncatedSvd out;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1;; ++it) {
    Eigen::MatrixXd z = a.transpose() * q;  // n x width
    orthonormalize_columns(z, ortho_seed++);
    q = a * z;
    orthonormalize_columns(q, ortho_seed++);
    if (it < opts.min_power_iterations && width < min_dim) continue;

    // Rayleigh-Ritz: A^T Q = B^T, B = Q^T A. SVD of the small factor of B^T.
    const Eigen::MatrixXd bt = a.transpose() * q;  // n x width
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(bt);
    const Eigen::MatrixXd q2 = qr.householderQ() * Eigen::MatrixXd::Identity(n, width);
    const Eigen::MatrixXd r = q2.transpose() * bt;  // width x width
    Eigen::JacobiSVD<Eigen::MatrixXd> small(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // B^T = Q2 R = Q2 Us S Vs^T  =>  A ~ Q Vs S Us^T Q2^T
    out.S = small.singularValues().head(rank);
    out.U = q * small.matrixV().leftCols(rank);
    out.V = q2 * small.matrixU().leftCols(rank);

    const double scale = small.singularValues()(0);
    if (!(scale > 0.0)) throw DataError("svd of a numerically zero matrix");
    const Eigen::MatrixXd av = a * out.V;
    residual = 0.0;
    for (Eigen::Index c = 0; c < rank; ++c) {
      residual = std::max(residual, (av.col(c) - out.S(c) * out.U.col(c)).norm());
    }
    residual /= scale;
    out.iterations = it;
    out.residual = residual;
    if (residual <= opts.tolerance || width == min_dim) break;
    if (it >= opts.max_power_iterations) {
      std::ostringstream msg;
      msg << "randomized svd did not converge after " << it << " iterations; relative residual "
          << residual << " > tolerance " << opts.tolerance;
      throw ConvergenceError(msg.str(), residual);
    }
  }
  fix_signs(out);
  return out;
}

}  // namespace lexprop
