#include "mlsc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlsc/error.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

namespace {

void check_points(const Eigen::MatrixXd& points, int k) {
  if (k < 1) throw Error(ErrorCode::kParameter, "K must be at least 1");
  if (points.rows() < k) {
    throw Error(ErrorCode::kSize, "need at least K=" + std::to_string(k) + " points, got " +
                                      std::to_string(points.rows()));
  }
  if (!points.allFinite()) throw Error(ErrorCode::kContract, "points have non-finite coordinates");
}

// Centroids of an assignment; empty clusters keep a zero row.
Eigen::MatrixXd centroids(const Eigen::MatrixXd& points, const std::vector<int>& assignment, int k,
                          std::vector<std::size_t>& counts) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, points.cols());
  counts.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    c.row(assignment[i]) += points.row(i);
    ++counts[assignment[i]];
  }
  for (int a = 0; a < k; ++a) {
    if (counts[a] > 0) c.row(a) /= static_cast<double>(counts[a]);
  }
  return c;
}

double assigned_cost(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                     const std::vector<int>& assignment) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    cost += (points.row(i) - centers.row(assignment[i])).squaredNorm();
  }
  return cost;
}

Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index m = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m))));
  Eigen::VectorXd dist(m);
  for (Eigen::Index i = 0; i < m; ++i) dist[i] = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += dist[i];
        if (target < acc && dist[i] > 0.0) {
          pick = i;
          break;
        }
      }
      while (dist[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < m; ++i) {
      dist[i] = std::min(dist[i], (points.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

}  // namespace

std::size_t kmeans_restarts(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kParameter, "eps must be positive");
  const double r = std::ceil(10.0 / eps);
  return r >= 200.0 ? 200 : static_cast<std::size_t>(std::max(1.0, r));
}

double kmeans_cost(const Eigen::MatrixXd& points, const std::vector<int>& assignment, int k) {
  std::vector<std::size_t> counts;
  return assigned_cost(points, centroids(points, assignment, k, counts), assignment);
}

KMeansResult lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, std::size_t max_iterations) {
  const Eigen::Index m = points.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.assignment.assign(static_cast<std::size_t>(m), -1);
  std::vector<std::size_t> counts;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int a = 0; a < k; ++a) {
        const double d = (points.row(i) - centers.row(a)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = a;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    r.iterations = it + 1;
    Eigen::MatrixXd next = centroids(points, r.assignment, k, counts);
    r.cost_trace.push_back(assigned_cost(points, next, r.assignment));
    // An emptied center moves to the point farthest from its own center.
    for (int a = 0; a < k; ++a) {
      if (counts[a] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double d = (points.row(i) - next.row(r.assignment[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      next.row(a) = points.row(far);
    }
    centers = std::move(next);
  }
  // Final centers are the centroids of the final assignment.
  r.centers = centroids(points, r.assignment, k, counts);
  for (int a = 0; a < k; ++a) {
    if (counts[a] == 0) r.centers.row(a) = centers.row(a);
  }
  r.cost = assigned_cost(points, r.centers, r.assignment);
  return r;
}

KMeansResult kmeans_single_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                               std::size_t max_iterations) {
  check_points(points, k);
  Rng rng(seed, 0);
  return lloyd(points, seed_centers(points, k, rng), max_iterations);
}

KMeansResult kmeans_approx(const Eigen::MatrixXd& points, int k, double eps, std::uint64_t seed) {
  check_points(points, k);
  const std::size_t runs = kmeans_restarts(eps);
  KMeansResult best;
  for (std::size_t run = 0; run < runs; ++run) {
    Rng rng(seed, run + 1);
    KMeansResult r = lloyd(points, seed_centers(points, k, rng), 100);
    if (run == 0 || r.cost < best.cost) {
      r.winning_run = run;
      best = std::move(r);
    }
  }
  return best;
}

KMeansResult kmeans_exact(const Eigen::MatrixXd& points, int k) {
  check_points(points, k);
  const auto m = static_cast<std::size_t>(points.rows());
  if (m > 14) throw Error(ErrorCode::kSize, "exact K-means enumeration is limited to 14 points");

  // Restricted growth strings enumerate each partition into <= K blocks once.
  std::vector<int> label(m, 0);
  std::vector<int> prefix_max(m, 0);
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  while (true) {
    const double cost = kmeans_cost(points, label, k);
    if (cost < best.cost) {
      best.cost = cost;
      best.assignment = label;
    }
    // Advance to the next restricted growth string; position 0 stays 0.
    bool advanced = false;
    for (std::size_t pos = m; pos > 1 && !advanced;) {
      --pos;
      const int cap = std::min(k - 1, prefix_max[pos - 1] + 1);
      if (label[pos] < cap) {
        ++label[pos];
        prefix_max[pos] = std::max(prefix_max[pos - 1], label[pos]);
        for (std::size_t q = pos + 1; q < m; ++q) {
          label[q] = 0;
          prefix_max[q] = prefix_max[q - 1];
        }
        advanced = true;
      }
    }
    if (!advanced) break;
  }
  std::vector<std::size_t> counts;
  best.centers = centroids(points, best.assignment, k, counts);
  best.cost = assigned_cost(points, best.centers, best.assignment);
  return best;
}

}  // namespace mlsc
