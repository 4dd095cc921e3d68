#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mlsc/genmodel.hpp"

namespace mlsc {

struct EvalReport {
  double nmi = 0.0;
  double overall_error = 0.0;
  std::vector<double> per_community;  // f_a per true community
  std::vector<int> permutation;       // estimated label -> aligned true label
  Eigen::MatrixXi confusion;          // rows: true, cols: estimated (padded square)
};

/// I(X;Y) / sqrt(H(X) H(Y)) with natural logarithms. When either partition
/// has zero entropy the result is 1 for identical partitions and 0 otherwise.
double nmi(const std::vector<int>& truth, const std::vector<int>& est);

Eigen::MatrixXi confusion_matrix(const std::vector<int>& truth, const std::vector<int>& est,
                                 int size);

/// Maximum-weight perfect matching on a square weight matrix (Hungarian
/// method). Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

/// Best label bijection by trying every permutation (size <= 10).
std::vector<int> max_weight_assignment_exhaustive(const Eigen::MatrixXd& weight);

/// Minimum misclassification over label bijections, per-community error
/// fractions under that bijection, and NMI.
EvalReport misclassification(const Membership& truth, const Membership& est);

}  // namespace mlsc
