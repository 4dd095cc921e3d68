#include "mlsc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsc/error.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

namespace {

void check_k(std::size_t n, int k) {
  if (k < 1) throw Error(ErrorCode::kDimension, "K must be at least 1");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kDimension,
                "K=" + std::to_string(k) + " exceeds matrix order " + std::to_string(n));
  }
}

void check_symmetric(const CountMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      if (m.at(static_cast<std::size_t>(cols[q]), i) != vals[q]) {
        throw Error(ErrorCode::kContract, "matrix is not symmetric");
      }
    }
  }
}

void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimension, "matrix is not square");
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorCode::kContract, "matrix is not symmetric");
  }
  if (!m.allFinite()) throw Error(ErrorCode::kContract, "matrix has non-finite entries");
}

bool tied(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
}

SpectralEmbedding dense_top_k(const Eigen::MatrixXd& m, int k, const EigenOptions& opts) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kConvergence, "dense eigensolver failed");
  const auto n = m.rows();
  SpectralEmbedding out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int c = 0; c < k; ++c) {
    out.values[c] = solver.eigenvalues()[n - 1 - c];
    out.vectors.col(c) = solver.eigenvectors().col(n - 1 - c);
  }
  if (k < n) out.ambiguous_gap = tied(solver.eigenvalues()[n - k], solver.eigenvalues()[n - k - 1], opts.gap_tol);
  return out;
}

// Thick-restarted block Lanczos. The basis is kept fully orthonormal and the
// projected matrix is formed explicitly as V^T (M V), so restarted bases need
// not carry the tridiagonal structure.
template <class Apply>
SpectralEmbedding block_lanczos(Eigen::Index n, Apply&& apply, int k, std::uint64_t seed,
                                const EigenOptions& opts) {
  const Eigen::Index block = std::min<Eigen::Index>(n, std::max(k, 3));
  const Eigen::Index basis_max =
      std::min<Eigen::Index>(n, std::max<Eigen::Index>(k + 3 * block, 2 * k + 20));
  Rng rng(seed, 0x1a2c);

  Eigen::MatrixXd v(n, basis_max);
  Eigen::MatrixXd av(n, basis_max);
  Eigen::Index cols = 0;

  auto random_vector = [&] {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal(0.0, 1.0);
    return x;
  };

  // Appends x (orthogonalized, normalized) and its image. Near-dependent
  // candidates are replaced by fresh random directions.
  auto append = [&](Eigen::VectorXd x) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double before = x.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (cols > 0) x -= v.leftCols(cols) * (v.leftCols(cols).transpose() * x);
      }
      const double after = x.norm();
      if (before > 0.0 && after > 1e-10 * before) {
        v.col(cols) = x / after;
        Eigen::VectorXd y(n);
        apply(v.col(cols), y);
        av.col(cols) = y;
        ++cols;
        return;
      }
      x = random_vector();
    }
    throw Error(ErrorCode::kConvergence, "could not extend Krylov basis");
  };

  for (Eigen::Index c = 0; c < block && cols < basis_max; ++c) append(random_vector());

  SpectralEmbedding out;
  Eigen::Index last_block_begin = 0;
  for (std::size_t restart = 0;; ++restart) {
    while (cols < basis_max) {
      const Eigen::Index begin = cols;
      const Eigen::Index end = cols;
      for (Eigen::Index c = last_block_begin; c < end && cols < basis_max; ++c) {
        append(av.col(c));
      }
      last_block_begin = begin;
    }

    Eigen::MatrixXd h = v.leftCols(cols).transpose() * av.leftCols(cols);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    if (small.info() != Eigen::Success) throw Error(ErrorCode::kConvergence, "projected eigensolve failed");

    const Eigen::Index keep = std::min<Eigen::Index>(cols - (cols == n ? 0 : block),
                                                     std::max<Eigen::Index>(k + block, k));
    Eigen::MatrixXd s(cols, keep);
    Eigen::VectorXd theta(keep);
    for (Eigen::Index c = 0; c < keep; ++c) {
      s.col(c) = small.eigenvectors().col(cols - 1 - c);
      theta[c] = small.eigenvalues()[cols - 1 - c];
    }
    Eigen::MatrixXd y = v.leftCols(cols) * s;
    Eigen::MatrixXd ay = av.leftCols(cols) * s;
    Eigen::MatrixXd resid = ay.leftCols(k) - y.leftCols(k) * theta.head(k).asDiagonal();

    bool converged = cols == n;
    if (!converged) {
      converged = true;
      for (int c = 0; c < k; ++c) {
        if (resid.col(c).norm() > opts.residual_tol * std::max(1.0, std::abs(theta[c]))) {
          converged = false;
          break;
        }
      }
    }
    if (converged || restart >= opts.max_restarts) {
      if (!converged) throw Error(ErrorCode::kConvergence, "Lanczos did not reach the residual target");
      out.values = theta.head(k);
      out.vectors = y.leftCols(k);
      out.restarts = restart;
      if (keep > k) out.ambiguous_gap = tied(theta[k - 1], theta[k], opts.gap_tol);
      return out;
    }

    // Restart from the leading Ritz vectors plus the residual block, which
    // spans the next Krylov direction of each kept vector.
    v.leftCols(keep) = y;
    av.leftCols(keep) = ay;
    cols = keep;
    const Eigen::Index fresh = std::min<Eigen::Index>(block, basis_max - cols);
    last_block_begin = cols;
    Eigen::MatrixXd r = ay.leftCols(std::min<Eigen::Index>(keep, fresh)) -
                        y.leftCols(std::min<Eigen::Index>(keep, fresh)) *
                            theta.head(std::min<Eigen::Index>(keep, fresh)).asDiagonal();
    for (Eigen::Index c = 0; c < r.cols(); ++c) append(r.col(c));
  }
}

}  // namespace

Eigen::MatrixXd to_dense(const CountMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) d(static_cast<Eigen::Index>(i), cols[q]) = vals[q];
  }
  return d;
}

SpectralEmbedding top_k_eigenpairs(const CountMatrix& m, int k, std::uint64_t seed,
                                   const EigenOptions& opts) {
  check_k(m.size(), k);
  check_symmetric(m);
  if (m.size() <= opts.dense_limit && !opts.force_iterative) return dense_top_k(to_dense(m), k, opts);
  auto apply = [&m](const auto& x, Eigen::VectorXd& y) {
    const Eigen::VectorXd xv = x;
    m.multiply(std::span<const double>(xv.data(), static_cast<std::size_t>(xv.size())),
               std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  };
  return block_lanczos(static_cast<Eigen::Index>(m.size()), apply, k, seed, opts);
}

SpectralEmbedding top_k_eigenpairs(const Eigen::MatrixXd& m, int k, std::uint64_t seed,
                                   const EigenOptions& opts) {
  check_symmetric(m);
  check_k(static_cast<std::size_t>(m.rows()), k);
  if (static_cast<std::size_t>(m.rows()) <= opts.dense_limit && !opts.force_iterative) {
    return dense_top_k(m, k, opts);
  }
  auto apply = [&m](const auto& x, Eigen::VectorXd& y) { y.noalias() = m * x; };
  return block_lanczos(m.rows(), apply, k, seed, opts);
}

std::vector<double> all_eigenvalues(const Eigen::MatrixXd& m) {
  check_symmetric(m);
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kConvergence, "dense eigensolver failed");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> all_eigenvalues(const CountMatrix& m) {
  check_symmetric(m);
  return all_eigenvalues(to_dense(m));
}

std::size_t count_eigenvalues_above(const CountMatrix& m, double threshold, std::uint64_t seed,
                                    const EigenOptions& opts) {
  const std::size_t n = m.size();
  if (n == 0) return 0;
  if (n <= opts.dense_limit && !opts.force_iterative) {
    const auto values = all_eigenvalues(m);
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
  }
  std::size_t window = std::min<std::size_t>(n, 8);
  while (true) {
    const auto emb = top_k_eigenpairs(m, static_cast<int>(window), seed, opts);
    std::size_t above = 0;
    for (Eigen::Index c = 0; c < emb.values.size(); ++c) above += emb.values[c] > threshold ? 1 : 0;
    if (above < window || window == n) return above;
    window = std::min(n, 2 * window);
  }
}

NormalizedEmbedding normalize_rows(const Eigen::MatrixXd& vectors) {
  NormalizedEmbedding out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    if (vectors.row(i).norm() >= 1e-12) keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorCode::kDegenerateEmbedding, "every embedding row is zero");
  out.rows.resize(static_cast<Eigen::Index>(keep.size()), vectors.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.rows.row(static_cast<Eigen::Index>(r)) = vectors.row(keep[r]) / vectors.row(keep[r]).norm();
    out.indices.push_back(static_cast<NodeId>(keep[r]));
  }
  return out;
}

}  // namespace mlsc
