#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlsc/genmodel.hpp"
#include "mlsc/netcore.hpp"
#include "mlsc/spectral.hpp"

namespace mlsc {

enum class Method { kAlg1, kAlg2, kBaselineSum, kBaselineSpectralSum };

const char* method_name(Method m);

struct DetectionResult {
  Membership membership;
  PruneResult kept;
  std::vector<double> eigenvalues;  // descending
  double kmeans_cost = 0.0;
  Method method = Method::kAlg1;
  /// Pruned matrix carried no two-path at all; every node got label 0.
  bool low_confidence = false;
  bool ambiguous_gap = false;
  /// Rows that entered K-means (n' for Algorithm 1, n'' for Algorithm 2).
  std::size_t clustered_rows = 0;
  std::vector<std::string> warnings;
};

struct DetectionOptions {
  double eps = 0.5;
  std::uint64_t seed = 0;
  EigenOptions eigen;
  unsigned workers = 1;
};

/// Spectral clustering of the pruned sum of squared adjacency matrices.
DetectionResult algorithm1(const MultiRelationalNetwork& net, int k, const DetectionOptions& opts = {});

/// Algorithm 1 with K-means on the unit-normalized nonzero eigenvector rows.
DetectionResult algorithm2(const MultiRelationalNetwork& net, int k, const DetectionOptions& opts = {});

struct KEstimate {
  std::size_t k_hat = 0;
  double threshold = 0.0;
  double mean_two = 0.0;
  PruneResult kept;
};

/// tau = (T m) (T m^{1/2})^{-1/8} / 4 for mean two-path count m.
double k_hat_threshold(std::size_t layers, double mean_two);

/// Number of eigenvalues of the pruned two-path matrix strictly above tau.
KEstimate algorithm3(const MultiRelationalNetwork& net, const DetectionOptions& opts = {});

/// Spectral clustering of the pruned plain sum of adjacency matrices, with
/// nodes above the Gamma_1 max-degree order statistic removed.
DetectionResult baseline_sum_spectral(const MultiRelationalNetwork& net, int k,
                                      const DetectionOptions& opts = {});

/// K-means on the rows of sum_t U^(t), U^(t) the sign-fixed leading
/// eigenvectors of each layer.
DetectionResult baseline_spectral_sum(const MultiRelationalNetwork& net, int k,
                                      const DetectionOptions& opts = {});

/// Steps 6-9 (embedding, K-means, extension) on an arbitrary symmetric
/// matrix, e.g. a population two-path matrix. `kept` selects the rows used.
DetectionResult cluster_matrix(const Eigen::MatrixXd& matrix, std::span<const NodeId> kept, int k,
                               bool spherical, const DetectionOptions& opts = {});

struct DiagnosticConstants {
  double c = 1.0;
  double c_prime = 1.0;
  double delta = 8.5;
};

struct TheoryDiagnostics {
  double d = 0.0;          // n max_{a,b,t} B_ab^(t)
  double lambda = 0.0;     // mean_t lambda_K(((n/d) B^(t))^2)
  double signal = 0.0;     // (T d)^{1/4} lambda
  std::size_t n_min = 0;
  std::size_t n_max = 0;
  double bound = 0.0;      // misclassification bound (infinite when lambda = 0)
  double probability = 0.0;  // lower bound on the probability the bound holds
  bool condition_ok = false;

  struct DegreeCorrected {
    std::vector<double> weighted_sizes;  // sum_{i in C_a} psi_i^2
    std::vector<double> heterogeneity;   // sum psi^2 * sum psi^-2 per community
    double psi_min = 0.0;
    double weighted_min = 0.0;
    double weighted_max = 0.0;
    double count_bound = 0.0;  // bound on the number of misclassified nodes
    double probability = 0.0;
  };
  std::optional<DegreeCorrected> dcbm;
};

TheoryDiagnostics theory_diagnostics(const ModelParams& params, const Membership& labels,
                                     const DiagnosticConstants& constants = {});

}  // namespace mlsc
