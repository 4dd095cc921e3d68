#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mlsc/netcore.hpp"

namespace mlsc {

struct EigenOptions {
  /// Residual target: ||M v - lambda v|| <= residual_tol * max(1, |lambda|).
  double residual_tol = 1e-6;
  /// Relative width under which lambda_K and lambda_{K+1} count as tied.
  double gap_tol = 1e-10;
  /// Matrices up to this order are solved densely.
  std::size_t dense_limit = 256;
  bool force_iterative = false;
  std::size_t max_restarts = 2000;
};

/// Leading eigenpairs, values in descending algebraic order.
struct SpectralEmbedding {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // n' x K, orthonormal columns
  /// lambda_K and lambda_{K+1} coincide; the basis is one of many.
  bool ambiguous_gap = false;
  std::size_t restarts = 0;

  std::size_t rows() const { return static_cast<std::size_t>(vectors.rows()); }
};

/// Unit-norm nonzero rows of an embedding and their source positions.
struct NormalizedEmbedding {
  Eigen::MatrixXd rows;
  std::vector<NodeId> indices;  // strictly increasing
};

/// K algebraically largest eigenpairs of a symmetric matrix. Orders up to
/// `dense_limit` use a dense tridiagonal QR solve; larger ones use a thick
/// restarted block Lanczos iteration with full reorthogonalization whose
/// random start block is drawn from `seed`.
SpectralEmbedding top_k_eigenpairs(const CountMatrix& m, int k, std::uint64_t seed,
                                   const EigenOptions& opts = {});
SpectralEmbedding top_k_eigenpairs(const Eigen::MatrixXd& m, int k, std::uint64_t seed,
                                   const EigenOptions& opts = {});

/// Full spectrum in descending order (dense solve).
std::vector<double> all_eigenvalues(const CountMatrix& m);
std::vector<double> all_eigenvalues(const Eigen::MatrixXd& m);

/// Number of eigenvalues strictly above `threshold`. Equivalent to counting
/// over all_eigenvalues; large matrices grow a top-k window instead of
/// computing the whole spectrum.
std::size_t count_eigenvalues_above(const CountMatrix& m, double threshold, std::uint64_t seed,
                                    const EigenOptions& opts = {});

Eigen::MatrixXd to_dense(const CountMatrix& m);

/// Rows with norm below 1e-12 are dropped; the rest are scaled to unit norm.
NormalizedEmbedding normalize_rows(const Eigen::MatrixXd& vectors);
inline NormalizedEmbedding normalize_rows(const SpectralEmbedding& emb) {
  return normalize_rows(emb.vectors);
}

}  // namespace mlsc
