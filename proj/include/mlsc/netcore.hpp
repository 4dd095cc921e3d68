#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace mlsc {

using NodeId = std::int32_t;

struct Edge {
  int layer;  // 0-based
  NodeId u;
  NodeId v;
};

/// One undirected, unweighted layer as sorted CSR neighbor lists.
class AdjacencyLayer {
 public:
  AdjacencyLayer() = default;
  /// Builds from an undirected edge list; duplicates and orientation collapse.
  /// Callers guarantee u != v and both endpoints < n.
  AdjacencyLayer(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeId i, NodeId j) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

/// T symmetric binary adjacency layers on a shared node set.
class MultiRelationalNetwork {
 public:
  MultiRelationalNetwork() = default;
  MultiRelationalNetwork(std::size_t n, std::vector<AdjacencyLayer> layers);

  /// Validates every edge (bounds, no self-loops) and builds the layers.
  static MultiRelationalNetwork from_edges(std::size_t n, std::size_t layers,
                                           const std::vector<Edge>& edges);

  std::size_t node_count() const { return n_; }
  std::size_t layer_count() const { return layers_.size(); }
  const AdjacencyLayer& layer(std::size_t t) const { return layers_[t]; }
  const std::vector<AdjacencyLayer>& layers() const { return layers_; }
  std::size_t edge_count() const;

  /// Relabels nodes: node i of *this becomes node perm[i].
  MultiRelationalNetwork permuted(std::span<const NodeId> perm) const;

 private:
  std::size_t n_ = 0;
  std::vector<AdjacencyLayer> layers_;
};

/// Symmetric integer matrix in CSR form with sorted column indices. Only
/// nonzero entries are stored.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::size_t n, std::vector<std::size_t> offsets, std::vector<NodeId> cols,
              std::vector<std::int32_t> values);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return cols_.size(); }
  std::span<const NodeId> row_cols(std::size_t i) const {
    return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
  }
  std::span<const std::int32_t> row_values(std::size_t i) const {
    return {values_.data() + offsets_[i], values_.data() + offsets_[i + 1]};
  }
  std::int32_t at(std::size_t i, std::size_t j) const;
  std::int64_t row_sum(std::size_t i) const;
  bool empty_pattern() const { return cols_.empty(); }

  /// y = M x.
  void multiply(std::span<const double> x, std::span<double> y) const;

  bool operator==(const CountMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<std::int32_t> values_;
};

/// Per-node degree statistics used by the pruning rule.
struct DegreeStats {
  std::vector<std::int64_t> max_degree;  // max over layers of the layer degree
  std::vector<std::int64_t> two_paths;   // row sums of the diagonal-zeroed sum of squares
  std::int64_t total_two_paths = 0;
  double mean_two = 0.0;                 // total_two_paths / (n T)
};

struct PruneResult {
  std::vector<NodeId> kept;  // strictly increasing
  std::size_t gamma1 = 1;
  std::size_t gamma2 = 1;
  std::int64_t threshold1 = 0;
  std::int64_t threshold2 = 0;
};

MultiRelationalNetwork load_multilayer(const std::filesystem::path& path, std::size_t n,
                                       std::size_t layers);
MultiRelationalNetwork read_multilayer(std::istream& in, std::size_t n, std::size_t layers);

/// Writes "t i j" records (1-based layer, i < j) preceded by a header comment
/// carrying n and T.
void write_edge_list(std::ostream& out, const MultiRelationalNetwork& net);

/// Sum over layers of the squared adjacency matrices, diagonal removed.
/// Rows are split across `workers` threads; the output does not depend on it.
CountMatrix sum_squared_adjacency(const MultiRelationalNetwork& net, unsigned workers = 1);

/// Sum over layers of the adjacency matrices.
CountMatrix sum_adjacency(const MultiRelationalNetwork& net);

DegreeStats degree_stats(const MultiRelationalNetwork& net);

/// Gamma_1 = ceil(n exp(-T^{1/2} m^{3/4} / 2)) and Gamma_2 = ceil(n exp(-T m^{1/2} / 3)),
/// both clamped to [1, n].
std::size_t prune_gamma1(std::size_t n, std::size_t layers, double mean_two);
std::size_t prune_gamma2(std::size_t n, std::size_t layers, double mean_two);

/// The (rank)-th smallest value, rank counted from 1.
std::int64_t order_statistic(std::span<const std::int64_t> values, std::size_t rank);

/// Keeps nodes whose max-layer degree and two-path count both sit at or below
/// the order-statistic thresholds. Throws kDegeneratePruning if none survive.
PruneResult prune(const DegreeStats& stats, std::size_t n, std::size_t layers);

CountMatrix submatrix(const CountMatrix& m, std::span<const NodeId> kept);

}  // namespace mlsc
