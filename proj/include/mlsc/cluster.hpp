#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mlsc {

struct KMeansResult {
  std::vector<int> assignment;  // labels in [0, K)
  Eigen::MatrixXd centers;      // K x d
  double cost = 0.0;            // sum of squared distances to assigned centers
  std::vector<double> cost_trace;  // cost after each Lloyd update (single run only)
  std::size_t iterations = 0;
  std::size_t winning_run = 0;
};

/// Number of independent restarts used for approximation parameter eps:
/// ceil(10 / eps), capped at 200.
std::size_t kmeans_restarts(double eps);

/// Squared-distance seeding followed by Lloyd iterations; best of
/// kmeans_restarts(eps) runs, ties broken by run index. Rows are points.
KMeansResult kmeans_approx(const Eigen::MatrixXd& points, int k, double eps, std::uint64_t seed);

/// One seeded run (seeding + Lloyd). Exposed for the monotonicity checks.
KMeansResult kmeans_single_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                               std::size_t max_iterations = 100);

/// Lloyd iterations from given centers until the assignment stops changing.
KMeansResult lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                   std::size_t max_iterations = 100);

/// Global optimum by enumerating every partition into at most K parts.
/// Limited to m <= 14 points.
KMeansResult kmeans_exact(const Eigen::MatrixXd& points, int k);

/// Cost of an assignment with centroid centers.
double kmeans_cost(const Eigen::MatrixXd& points, const std::vector<int>& assignment, int k);

}  // namespace mlsc
