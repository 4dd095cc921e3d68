#include "mlsc/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "mlsc/error.hpp"

namespace mlsc {

AdjacencyLayer::AdjacencyLayer(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  for (auto& [u, v] : edges) {
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  neighbors_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    neighbors_[fill[u]++] = v;
    neighbors_[fill[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);
  }
}

bool AdjacencyLayer::has_edge(NodeId i, NodeId j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

MultiRelationalNetwork::MultiRelationalNetwork(std::size_t n, std::vector<AdjacencyLayer> layers)
    : n_(n), layers_(std::move(layers)) {
  for (const auto& layer : layers_) {
    if (layer.node_count() != n_) {
      throw Error(ErrorCode::kDimension, "layer node count differs from network node count");
    }
  }
}

MultiRelationalNetwork MultiRelationalNetwork::from_edges(std::size_t n, std::size_t layers,
                                                          const std::vector<Edge>& edges) {
  std::vector<std::vector<std::pair<NodeId, NodeId>>> per_layer(layers);
  for (const auto& e : edges) {
    if (e.layer < 0 || static_cast<std::size_t>(e.layer) >= layers) {
      throw Error(ErrorCode::kBounds, "layer index " + std::to_string(e.layer + 1) +
                                          " outside [1, " + std::to_string(layers) + "]");
    }
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n) {
      throw Error(ErrorCode::kBounds, "node index outside [0, " + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      throw Error(ErrorCode::kSelfLoop, "self-loop at node " + std::to_string(e.u));
    }
    per_layer[e.layer].emplace_back(e.u, e.v);
  }
  std::vector<AdjacencyLayer> built;
  built.reserve(layers);
  for (auto& list : per_layer) built.emplace_back(n, std::move(list));
  return MultiRelationalNetwork(n, std::move(built));
}

std::size_t MultiRelationalNetwork::edge_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.edge_count();
  return total;
}

MultiRelationalNetwork MultiRelationalNetwork::permuted(std::span<const NodeId> perm) const {
  if (perm.size() != n_) throw Error(ErrorCode::kDimension, "permutation length mismatch");
  std::vector<AdjacencyLayer> out;
  out.reserve(layers_.size());
  for (const auto& layer : layers_) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < n_; ++i) {
      for (NodeId j : layer.neighbors(static_cast<NodeId>(i))) {
        if (static_cast<NodeId>(i) < j) edges.emplace_back(perm[i], perm[j]);
      }
    }
    out.emplace_back(n_, std::move(edges));
  }
  return MultiRelationalNetwork(n_, std::move(out));
}

// ---------------------------------------------------------------------------

CountMatrix::CountMatrix(std::size_t n, std::vector<std::size_t> offsets, std::vector<NodeId> cols,
                         std::vector<std::int32_t> values)
    : n_(n), offsets_(std::move(offsets)), cols_(std::move(cols)), values_(std::move(values)) {
  if (offsets_.size() != n_ + 1 || cols_.size() != values_.size() || offsets_.back() != cols_.size()) {
    throw Error(ErrorCode::kDimension, "inconsistent CSR arrays");
  }
}

std::int32_t CountMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<NodeId>(j));
  if (it == cols.end() || *it != static_cast<NodeId>(j)) return 0;
  return row_values(i)[it - cols.begin()];
}

std::int64_t CountMatrix::row_sum(std::size_t i) const {
  std::int64_t s = 0;
  for (auto v : row_values(i)) s += v;
  return s;
}

void CountMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) acc += values_[p] * x[cols_[p]];
    y[i] = acc;
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string trim_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

MultiRelationalNetwork read_multilayer(std::istream& in, std::size_t n, std::size_t layers) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(trim_comment(line));
    long long t, i, j;
    if (!(fields >> t)) {
      if (fields.eof()) continue;  // blank or comment-only line
      throw ParseError(lineno, "expected \"t i j\"");
    }
    if (!(fields >> i >> j)) throw ParseError(lineno, "expected \"t i j\"");
    std::string rest;
    if (fields >> rest) throw ParseError(lineno, "trailing field \"" + rest + "\"");
    if (i == j) {
      throw Error(ErrorCode::kSelfLoop, "line " + std::to_string(lineno) + ": self-loop at node " +
                                            std::to_string(i));
    }
    if (t < 1 || t > static_cast<long long>(layers) || i < 0 || j < 0 ||
        i >= static_cast<long long>(n) || j >= static_cast<long long>(n)) {
      throw Error(ErrorCode::kBounds, "line " + std::to_string(lineno) + ": record \"" +
                                          std::to_string(t) + " " + std::to_string(i) + " " +
                                          std::to_string(j) + "\" out of range for n=" +
                                          std::to_string(n) + ", T=" + std::to_string(layers));
    }
    edges.push_back({static_cast<int>(t - 1), static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  return MultiRelationalNetwork::from_edges(n, layers, edges);
}

MultiRelationalNetwork load_multilayer(const std::filesystem::path& path, std::size_t n,
                                       std::size_t layers) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_multilayer(in, n, layers);
}

void write_edge_list(std::ostream& out, const MultiRelationalNetwork& net) {
  out << "# n=" << net.node_count() << " T=" << net.layer_count() << "\n";
  for (std::size_t t = 0; t < net.layer_count(); ++t) {
    const auto& layer = net.layer(t);
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      for (NodeId j : layer.neighbors(static_cast<NodeId>(i))) {
        if (static_cast<NodeId>(i) < j) out << (t + 1) << ' ' << i << ' ' << j << '\n';
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

struct RowBlock {
  std::vector<std::size_t> lengths;
  std::vector<NodeId> cols;
  std::vector<std::int32_t> values;
};

// Two-path counts for rows [begin, end). The dense accumulator is reset
// through the touched list so each row costs O(two-paths).
void square_rows(const MultiRelationalNetwork& net, std::size_t begin, std::size_t end,
                 RowBlock& out) {
  const std::size_t n = net.node_count();
  std::vector<std::int32_t> acc(n, 0);
  std::vector<NodeId> touched;
  out.lengths.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const auto row = static_cast<NodeId>(i);
    for (const auto& layer : net.layers()) {
      for (NodeId k : layer.neighbors(row)) {
        for (NodeId j : layer.neighbors(k)) {
          if (j == row) continue;
          if (acc[j]++ == 0) touched.push_back(j);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (NodeId j : touched) {
      out.cols.push_back(j);
      out.values.push_back(acc[j]);
      acc[j] = 0;
    }
    out.lengths.push_back(touched.size());
    touched.clear();
  }
}

}  // namespace

CountMatrix sum_squared_adjacency(const MultiRelationalNetwork& net, unsigned workers) {
  const std::size_t n = net.node_count();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<RowBlock> blocks(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  if (workers == 1) {
    square_rows(net, 0, n, blocks[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk);
      const std::size_t e = std::min(n, b + chunk);
      pool.emplace_back([&, b, e, w] { square_rows(net, b, e, blocks[w]); });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::size_t> offsets{0};
  offsets.reserve(n + 1);
  std::vector<NodeId> cols;
  std::vector<std::int32_t> values;
  for (auto& blk : blocks) {
    for (auto len : blk.lengths) offsets.push_back(offsets.back() + len);
    cols.insert(cols.end(), blk.cols.begin(), blk.cols.end());
    values.insert(values.end(), blk.values.begin(), blk.values.end());
  }
  return CountMatrix(n, std::move(offsets), std::move(cols), std::move(values));
}

CountMatrix sum_adjacency(const MultiRelationalNetwork& net) {
  const std::size_t n = net.node_count();
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> cols;
  std::vector<std::int32_t> values;
  std::vector<std::int32_t> acc(n, 0);
  std::vector<NodeId> touched;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& layer : net.layers()) {
      for (NodeId j : layer.neighbors(static_cast<NodeId>(i))) {
        if (acc[j]++ == 0) touched.push_back(j);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (NodeId j : touched) {
      cols.push_back(j);
      values.push_back(acc[j]);
      acc[j] = 0;
    }
    offsets.push_back(cols.size());
    touched.clear();
  }
  return CountMatrix(n, std::move(offsets), std::move(cols), std::move(values));
}

DegreeStats degree_stats(const MultiRelationalNetwork& net) {
  const std::size_t n = net.node_count();
  DegreeStats s;
  s.max_degree.assign(n, 0);
  s.two_paths.assign(n, 0);
  // Row i of A^2 without its diagonal sums to sum_{k ~ i} deg(k) - deg(i).
  for (const auto& layer : net.layers()) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto node = static_cast<NodeId>(i);
      const auto deg = static_cast<std::int64_t>(layer.degree(node));
      s.max_degree[i] = std::max(s.max_degree[i], deg);
      std::int64_t two = -deg;
      for (NodeId k : layer.neighbors(node)) two += static_cast<std::int64_t>(layer.degree(k));
      s.two_paths[i] += two;
    }
  }
  for (auto v : s.two_paths) s.total_two_paths += v;
  const std::size_t denom = n * net.layer_count();
  s.mean_two = denom == 0 ? 0.0 : static_cast<double>(s.total_two_paths) / static_cast<double>(denom);
  return s;
}

namespace {

std::size_t clamp_gamma(double raw, std::size_t n) {
  const double g = std::ceil(raw);
  if (!(g >= 1.0)) return 1;
  if (g >= static_cast<double>(n)) return std::max<std::size_t>(n, 1);
  return static_cast<std::size_t>(g);
}

}  // namespace

std::size_t prune_gamma1(std::size_t n, std::size_t layers, double mean_two) {
  const double t = static_cast<double>(layers);
  return clamp_gamma(static_cast<double>(n) * std::exp(-0.5 * std::sqrt(t) * std::pow(mean_two, 0.75)), n);
}

std::size_t prune_gamma2(std::size_t n, std::size_t layers, double mean_two) {
  const double t = static_cast<double>(layers);
  return clamp_gamma(static_cast<double>(n) * std::exp(-t * std::sqrt(mean_two) / 3.0), n);
}

std::int64_t order_statistic(std::span<const std::int64_t> values, std::size_t rank) {
  if (rank < 1 || rank > values.size()) {
    throw Error(ErrorCode::kBounds, "order statistic rank out of range");
  }
  std::vector<std::int64_t> copy(values.begin(), values.end());
  std::nth_element(copy.begin(), copy.begin() + (rank - 1), copy.end());
  return copy[rank - 1];
}

PruneResult prune(const DegreeStats& stats, std::size_t n, std::size_t layers) {
  if (stats.max_degree.size() != n || stats.two_paths.size() != n) {
    throw Error(ErrorCode::kDimension, "degree statistics do not match node count");
  }
  if (n == 0) throw Error(ErrorCode::kDegeneratePruning, "network has no nodes");
  if (!(stats.mean_two >= 0.0)) throw Error(ErrorCode::kContract, "mean two-path count is negative");

  PruneResult r;
  r.gamma1 = prune_gamma1(n, layers, stats.mean_two);
  r.gamma2 = prune_gamma2(n, layers, stats.mean_two);
  r.threshold1 = order_statistic(stats.max_degree, n + 1 - r.gamma1);
  r.threshold2 = order_statistic(stats.two_paths, n + 1 - r.gamma2);
  for (std::size_t i = 0; i < n; ++i) {
    if (stats.max_degree[i] <= r.threshold1 && stats.two_paths[i] <= r.threshold2) {
      r.kept.push_back(static_cast<NodeId>(i));
    }
  }
  if (r.kept.empty()) {
    throw Error(ErrorCode::kDegeneratePruning,
                "pruning kept no node (Gamma1=" + std::to_string(r.gamma1) +
                    ", Gamma2=" + std::to_string(r.gamma2) + ")");
  }
  return r;
}

CountMatrix submatrix(const CountMatrix& m, std::span<const NodeId> kept) {
  if (kept.empty()) throw Error(ErrorCode::kDimension, "empty index set for submatrix");
  std::vector<NodeId> remap(m.size(), -1);
  for (std::size_t p = 0; p < kept.size(); ++p) {
    if (kept[p] < 0 || static_cast<std::size_t>(kept[p]) >= m.size()) {
      throw Error(ErrorCode::kBounds, "submatrix index out of range");
    }
    if (p > 0 && kept[p] <= kept[p - 1]) {
      throw Error(ErrorCode::kContract, "submatrix indices must be strictly increasing");
    }
    remap[kept[p]] = static_cast<NodeId>(p);
  }
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> cols;
  std::vector<std::int32_t> values;
  for (NodeId src : kept) {
    const auto rc = m.row_cols(src);
    const auto rv = m.row_values(src);
    for (std::size_t q = 0; q < rc.size(); ++q) {
      if (remap[rc[q]] >= 0) {
        cols.push_back(remap[rc[q]]);
        values.push_back(rv[q]);
      }
    }
    offsets.push_back(cols.size());
  }
  return CountMatrix(kept.size(), std::move(offsets), std::move(cols), std::move(values));
}

}  // namespace mlsc
