#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mlsc/netcore.hpp"

namespace mlsc {

/// Community assignment with labels in [0, K). Label 0 is the "first
/// community" that absorbs pruned nodes in the detection pipelines.
struct Membership {
  int communities = 0;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  Eigen::MatrixXd one_hot() const;
  std::vector<std::size_t> community_sizes() const;
  /// Throws if K < 1 or any label falls outside [0, K).
  void validate() const;
};

/// T symmetric K x K connectivity probability matrices.
struct BlockSchedule {
  int communities = 0;
  std::vector<Eigen::MatrixXd> mats;
  /// Entries that came out negative (or above one) and were clamped.
  std::size_t clamped_entries = 0;

  std::size_t layer_count() const { return mats.size(); }
  void validate() const;
};

struct ModelParams {
  std::size_t nodes = 0;
  Eigen::VectorXd pi;
  BlockSchedule schedule;
  /// Degree parameters; absent for the plain multilayer SBM.
  std::optional<std::vector<double>> psi;

  int communities() const { return schedule.communities; }
  void validate() const;
};

enum class ModelVariant { kSbm, kDcbm };

/// Labels drawn i.i.d. from Mult(1; pi).
Membership sample_memberships(std::size_t n, const Eigen::VectorXd& pi, std::uint64_t seed);

/// psi_i = alpha_i / max{alpha_j : z_j = z_i}.
std::vector<double> normalize_psi(const Membership& labels, const std::vector<double>& alpha);

/// Independent Bernoulli edges with probability B_{z_i z_j} (times psi_i psi_j
/// when degree parameters are present). Layer t draws from RNG stream t.
MultiRelationalNetwork sample_network(const ModelParams& params, const Membership& labels,
                                      std::uint64_t seed);

/// Probability matrices of the benchmark scenarios. `form` selects the
/// constant-prefactor schedule of Scenario 1 (form 2) instead of the
/// (log n)^{3/4} prefactor (form 1); other scenarios ignore it.
BlockSchedule scenario_schedule(int id, ModelVariant variant, std::size_t n, std::size_t layers,
                                std::uint64_t seed, int form = 1);

/// Full parameter set for a scenario: balanced pi, the schedule above, and for
/// the DCBM variant raw psi_i ~ U(0.5, 1).
ModelParams scenario_params(int id, ModelVariant variant, std::size_t n, std::size_t layers,
                            std::uint64_t seed, int form = 1);

/// Draws psi_i ~ U(lo, hi) i.i.d.
std::vector<double> sample_uniform_psi(std::size_t n, double lo, double hi, std::uint64_t seed);

/// Population two-path matrix: entry (i, j), i != j, equals
/// sum_t sum_{k != i, j} P_ik P_kj; diagonal zero.
Eigen::MatrixXd expected_sum_squares(const ModelParams& params, const Membership& labels);

/// Edge probability matrix P^{(t)} (zero diagonal) for one layer.
Eigen::MatrixXd edge_probabilities(const ModelParams& params, const Membership& labels,
                                   std::size_t layer);

}  // namespace mlsc
