#include "mlsc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlsc/cluster.hpp"
#include "mlsc/error.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

const char* method_name(Method m) {
  switch (m) {
    case Method::kAlg1: return "Alg1";
    case Method::kAlg2: return "Alg2";
    case Method::kBaselineSum: return "BaselineSum";
    case Method::kBaselineSpectralSum: return "BaselineSpectralSum";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kEigenStream = 1;
constexpr std::uint64_t kKMeansStream = 2;

void check_k(int k) {
  if (k < 1) throw Error(ErrorCode::kParameter, "K must be at least 1");
}

PruneResult prune_for_detection(const DegreeStats& stats, std::size_t n, std::size_t layers) {
  try {
    return prune(stats, n, layers);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegeneratePruning) throw Error(ErrorCode::kDetectionFailure, e.what());
    throw;
  }
}

PruneResult keep_all(std::size_t n, const DegreeStats& stats) {
  PruneResult r;
  r.kept.resize(n);
  std::iota(r.kept.begin(), r.kept.end(), 0);
  r.gamma1 = 1;
  r.gamma2 = 1;
  if (n > 0) {
    r.threshold1 = *std::max_element(stats.max_degree.begin(), stats.max_degree.end());
    r.threshold2 = *std::max_element(stats.two_paths.begin(), stats.two_paths.end());
  }
  return r;
}

// Clusters the embedding rows and extends labels to all n nodes. Rows not in
// `kept` (and, for the spherical variant, zero rows) receive label 0.
template <class Matrix>
DetectionResult embed_and_cluster(const Matrix& sub, std::size_t n, std::span<const NodeId> kept,
                                  bool all_zero, int k, bool spherical, const DetectionOptions& opts) {
  check_k(k);
  DetectionResult out;
  out.membership.communities = k;
  out.membership.labels.assign(n, 0);
  if (kept.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kDetectionFailure, "only " + std::to_string(kept.size()) +
                                                  " nodes survive pruning, fewer than K=" +
                                                  std::to_string(k));
  }
  if (all_zero) {
    out.low_confidence = true;
    out.eigenvalues.assign(static_cast<std::size_t>(k), 0.0);
    out.warnings.emplace_back("pruned two-path matrix is zero; all nodes assigned to community 1");
    return out;
  }

  const auto emb = top_k_eigenpairs(sub, k, derive_seed(opts.seed, kEigenStream), opts.eigen);
  out.eigenvalues.assign(emb.values.data(), emb.values.data() + emb.values.size());
  out.ambiguous_gap = emb.ambiguous_gap;
  if (emb.ambiguous_gap) out.warnings.emplace_back("lambda_K ties lambda_{K+1}; eigenbasis is not unique");

  const std::uint64_t km_seed = derive_seed(opts.seed, kKMeansStream);
  if (!spherical) {
    const auto km = kmeans_approx(emb.vectors, k, opts.eps, km_seed);
    out.kmeans_cost = km.cost;
    out.clustered_rows = kept.size();
    for (std::size_t j = 0; j < kept.size(); ++j) out.membership.labels[kept[j]] = km.assignment[j];
    return out;
  }

  const auto unit = normalize_rows(emb);
  if (unit.rows.rows() < k) {
    throw Error(ErrorCode::kDetectionFailure, "fewer than K nonzero embedding rows");
  }
  const auto km = kmeans_approx(unit.rows, k, opts.eps, km_seed);
  out.kmeans_cost = km.cost;
  out.clustered_rows = unit.indices.size();
  for (std::size_t r = 0; r < unit.indices.size(); ++r) {
    out.membership.labels[kept[unit.indices[r]]] = km.assignment[r];
  }
  return out;
}

DetectionResult squared_pipeline(const MultiRelationalNetwork& net, int k, bool spherical,
                                 const DetectionOptions& opts) {
  check_k(k);
  if (net.node_count() == 0) throw Error(ErrorCode::kDetectionFailure, "network has no nodes");
  const auto sq = sum_squared_adjacency(net, opts.workers);
  const auto stats = degree_stats(net);
  auto kept = prune_for_detection(stats, net.node_count(), net.layer_count());
  const auto sub = submatrix(sq, kept.kept);
  auto out = embed_and_cluster(sub, net.node_count(), kept.kept, sub.empty_pattern(), k, spherical, opts);
  out.kept = std::move(kept);
  out.method = spherical ? Method::kAlg2 : Method::kAlg1;
  return out;
}

CountMatrix layer_matrix(const AdjacencyLayer& layer) {
  const std::size_t n = layer.node_count();
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> cols;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = layer.neighbors(static_cast<NodeId>(i));
    cols.insert(cols.end(), nb.begin(), nb.end());
    offsets.push_back(cols.size());
  }
  std::vector<std::int32_t> values(cols.size(), 1);
  return CountMatrix(n, std::move(offsets), std::move(cols), std::move(values));
}

}  // namespace

DetectionResult algorithm1(const MultiRelationalNetwork& net, int k, const DetectionOptions& opts) {
  return squared_pipeline(net, k, false, opts);
}

DetectionResult algorithm2(const MultiRelationalNetwork& net, int k, const DetectionOptions& opts) {
  return squared_pipeline(net, k, true, opts);
}

double k_hat_threshold(std::size_t layers, double mean_two) {
  if (mean_two <= 0.0) return 0.0;
  const double t = static_cast<double>(layers);
  return 0.25 * (t * mean_two) * std::pow(t * std::sqrt(mean_two), -0.125);
}

KEstimate algorithm3(const MultiRelationalNetwork& net, const DetectionOptions& opts) {
  if (net.node_count() == 0) throw Error(ErrorCode::kDetectionFailure, "network has no nodes");
  KEstimate out;
  const auto stats = degree_stats(net);
  out.mean_two = stats.mean_two;
  out.kept = prune_for_detection(stats, net.node_count(), net.layer_count());
  if (stats.mean_two == 0.0) return out;
  out.threshold = k_hat_threshold(net.layer_count(), stats.mean_two);
  const auto sub = submatrix(sum_squared_adjacency(net, opts.workers), out.kept.kept);
  out.k_hat = count_eigenvalues_above(sub, out.threshold, derive_seed(opts.seed, kEigenStream), opts.eigen);
  return out;
}

DetectionResult baseline_sum_spectral(const MultiRelationalNetwork& net, int k,
                                      const DetectionOptions& opts) {
  check_k(k);
  const std::size_t n = net.node_count();
  if (n == 0) throw Error(ErrorCode::kDetectionFailure, "network has no nodes");
  const auto stats = degree_stats(net);
  PruneResult kept = keep_all(n, stats);
  kept.kept.clear();
  kept.gamma1 = prune_gamma1(n, net.layer_count(), stats.mean_two);
  kept.threshold1 = order_statistic(stats.max_degree, n + 1 - kept.gamma1);
  for (std::size_t i = 0; i < n; ++i) {
    if (stats.max_degree[i] <= kept.threshold1) kept.kept.push_back(static_cast<NodeId>(i));
  }
  const auto sub = submatrix(sum_adjacency(net), kept.kept);
  auto out = embed_and_cluster(sub, n, kept.kept, sub.empty_pattern(), k, false, opts);
  out.kept = std::move(kept);
  out.method = Method::kBaselineSum;
  return out;
}

DetectionResult baseline_spectral_sum(const MultiRelationalNetwork& net, int k,
                                      const DetectionOptions& opts) {
  check_k(k);
  const std::size_t n = net.node_count();
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kDetectionFailure, "fewer nodes than communities");
  }
  DetectionResult out;
  out.method = Method::kBaselineSpectralSum;
  out.kept = keep_all(n, degree_stats(net));
  out.membership.communities = k;
  out.membership.labels.assign(n, 0);

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
  Eigen::VectorXd value_sum = Eigen::VectorXd::Zero(k);
  for (std::size_t t = 0; t < net.layer_count(); ++t) {
    const auto a = layer_matrix(net.layer(t));
    if (a.empty_pattern()) {
      out.warnings.push_back("layer " + std::to_string(t + 1) + " is empty; its eigenvectors are zero-filled");
      continue;
    }
    auto emb = top_k_eigenpairs(a, k, derive_seed(opts.seed, kEigenStream, t), opts.eigen);
    const double scale = std::max(1.0, std::abs(emb.values[0]));
    std::size_t zeroed = 0;
    for (int c = 0; c < k; ++c) {
      auto col = emb.vectors.col(c);
      if (std::abs(emb.values[c]) <= 1e-10 * scale) {
        col.setZero();
        ++zeroed;
        continue;
      }
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::abs(col[i]) > 1e-12) {
          if (col[i] < 0.0) col = -col;
          break;
        }
      }
    }
    if (zeroed > 0) {
      out.warnings.push_back("layer " + std::to_string(t + 1) + " has " + std::to_string(zeroed) +
                             " zero eigenvalues among its top K; columns zero-filled");
    }
    total += emb.vectors;
    value_sum += emb.values;
  }
  out.eigenvalues.assign(value_sum.data(), value_sum.data() + value_sum.size());
  if (total.isZero(0.0)) {
    out.low_confidence = true;
    return out;
  }
  const auto km = kmeans_approx(total, k, opts.eps, derive_seed(opts.seed, kKMeansStream));
  out.kmeans_cost = km.cost;
  out.clustered_rows = n;
  out.membership.labels = km.assignment;
  return out;
}

DetectionResult cluster_matrix(const Eigen::MatrixXd& matrix, std::span<const NodeId> kept, int k,
                               bool spherical, const DetectionOptions& opts) {
  const auto n = static_cast<std::size_t>(matrix.rows());
  std::vector<Eigen::Index> idx(kept.begin(), kept.end());
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (idx[p] < 0 || static_cast<std::size_t>(idx[p]) >= n || (p > 0 && idx[p] <= idx[p - 1])) {
      throw Error(ErrorCode::kContract, "kept indices must be strictly increasing and in range");
    }
  }
  const Eigen::MatrixXd sub = matrix(idx, idx);
  auto out = embed_and_cluster(sub, n, kept, sub.isZero(0.0), k, spherical, opts);
  out.kept.kept.assign(kept.begin(), kept.end());
  out.method = spherical ? Method::kAlg2 : Method::kAlg1;
  return out;
}

TheoryDiagnostics theory_diagnostics(const ModelParams& params, const Membership& labels,
                                     const DiagnosticConstants& constants) {
  params.validate();
  labels.validate();
  if (!(constants.delta > 8.0)) throw Error(ErrorCode::kParameter, "Delta must exceed 8");
  const std::size_t n = labels.size();
  const int k = params.communities();
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(params.schedule.layer_count());

  TheoryDiagnostics out;
  double b_max = 0.0;
  for (const auto& b : params.schedule.mats) b_max = std::max(b_max, b.maxCoeff());
  out.d = nd * b_max;
  if (out.d <= 0.0) throw Error(ErrorCode::kParameter, "d = 0: every connectivity matrix is zero");

  double lambda_sum = 0.0;
  for (const auto& b : params.schedule.mats) {
    const Eigen::MatrixXd scaled = (nd / out.d) * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled, Eigen::EigenvaluesOnly);
    // Eigenvalues of the square are the squared eigenvalues; lambda_K is the smallest.
    lambda_sum += solver.eigenvalues().cwiseAbs2().minCoeff();
  }
  out.lambda = lambda_sum / td;
  out.signal = std::pow(td * out.d, 0.25) * out.lambda;

  const auto sizes = labels.community_sizes();
  out.n_min = *std::min_element(sizes.begin(), sizes.end());
  out.n_max = *std::max_element(sizes.begin(), sizes.end());

  const double c = constants.c;
  const double delta = constants.delta;
  const double td_quarter = std::pow(td * out.d, 0.25);
  const double balance = std::pow(static_cast<double>(out.n_min) / nd, 2.0);
  const double rhs = c * delta * std::sqrt(static_cast<double>(k)) / td_quarter;
  out.condition_ok = out.lambda * balance > std::max(7.0 / nd, rhs);
  out.bound = out.lambda * balance > 0.0 ? std::pow(rhs / (out.lambda * balance), 2.0)
                                         : std::numeric_limits<double>::infinity();
  const double tail = 2.0 * std::pow(nd, 5.0 - delta * delta / 12.0);
  out.probability = 1.0 - (constants.c_prime + 2.0 * nd * k) / (nd * std::pow(td * out.d, 0.75)) - tail;

  if (params.psi) {
    const auto& psi = *params.psi;
    TheoryDiagnostics::DegreeCorrected dc;
    dc.weighted_sizes.assign(static_cast<std::size_t>(k), 0.0);
    std::vector<double> inverse(static_cast<std::size_t>(k), 0.0);
    dc.psi_min = *std::min_element(psi.begin(), psi.end());
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<std::size_t>(labels.labels[i]);
      dc.weighted_sizes[a] += psi[i] * psi[i];
      inverse[a] += 1.0 / (psi[i] * psi[i]);
    }
    double tau_sum = 0.0;
    dc.heterogeneity.resize(static_cast<std::size_t>(k));
    for (std::size_t a = 0; a < dc.weighted_sizes.size(); ++a) {
      dc.heterogeneity[a] = dc.weighted_sizes[a] * inverse[a];
      tau_sum += dc.heterogeneity[a];
    }
    dc.weighted_min = *std::min_element(dc.weighted_sizes.begin(), dc.weighted_sizes.end());
    dc.weighted_max = *std::max_element(dc.weighted_sizes.begin(), dc.weighted_sizes.end());
    const double kd = static_cast<double>(k);
    const double wbal = std::pow(dc.weighted_min / nd, 2.0);
    if (out.lambda > 0.0 && dc.weighted_min > 0.0) {
      dc.count_bound =
          c * std::pow(kd * dc.weighted_max, 3.0) /
              (std::pow(dc.psi_min * out.lambda, 2.0) * std::pow(dc.weighted_min, 4.0)) +
          (nd + c * delta * std::sqrt(kd * tau_sum)) / (td_quarter * out.lambda * wbal);
    } else {
      dc.count_bound = std::numeric_limits<double>::infinity();
    }
    dc.probability = 1.0 - (constants.c_prime / nd + 2.0 * kd) * std::pow(td * out.d, -0.75) - tail;
    out.dcbm = std::move(dc);
  }
  return out;
}

}  // namespace mlsc
