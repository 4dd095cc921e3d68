#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mlsc/error.hpp"
#include "mlsc/netcore.hpp"
#include "test_support.hpp"

using namespace mlsc;

namespace {

MultiRelationalNetwork parse(const std::string& text, std::size_t n, std::size_t layers) {
  std::istringstream in(text);
  return read_multilayer(in, n, layers);
}

MultiRelationalNetwork path3() { return MultiRelationalNetwork::from_edges(3, 1, {{0, 0, 1}, {0, 1, 2}}); }

MultiRelationalNetwork cycle4() {
  return MultiRelationalNetwork::from_edges(4, 1, {{0, 0, 1}, {0, 1, 2}, {0, 2, 3}, {0, 3, 0}});
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("load: path, empty, duplicate") {
  auto p = parse("1 0 1\n1 1 2", 3, 1);
  CHECK(p.layer(0).has_edge(0, 1));
  CHECK(p.layer(0).has_edge(2, 1));
  CHECK_FALSE(p.layer(0).has_edge(0, 2));
  CHECK(p.edge_count() == 2);

  auto e = parse("", 5, 2);
  CHECK(e.layer_count() == 2);
  CHECK(e.edge_count() == 0);

  auto d = parse("1 0 1\n1 1 0", 2, 1);
  CHECK(d.edge_count() == 1);
  CHECK(d.layer(0).degree(0) == 1);
}

TEST_CASE("load: comments and errors") {
  auto c = parse("# header\n\n2 0 3  # trailing\n", 4, 2);
  CHECK(c.layer(1).has_edge(0, 3));
  CHECK(c.layer(0).edge_count() == 0);

  try {
    parse("1 0 1\n1 x 2\n", 3, 1);
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(e.line() == 2);
  }
  CHECK(code_of([] { parse("1 1 1\n", 3, 1); }) == ErrorCode::kSelfLoop);
  CHECK(code_of([] { parse("1 0 3\n", 3, 1); }) == ErrorCode::kBounds);
  CHECK(code_of([] { parse("2 0 1\n", 3, 1); }) == ErrorCode::kBounds);
  CHECK(code_of([] { parse("0 0 1\n", 3, 1); }) == ErrorCode::kBounds);
  CHECK(code_of([] { load_multilayer("/nonexistent/net.txt", 3, 1); }) == ErrorCode::kIo);
}

TEST_CASE("edge list round trip through a file") {
  auto net = testing::random_network(30, 3, 0.2, 5);
  auto path = std::filesystem::temp_directory_path() / "mlsc_netcore_roundtrip.txt";
  {
    std::ofstream out(path);
    write_edge_list(out, net);
  }
  auto back = load_multilayer(path, 30, 3);
  std::filesystem::remove(path);
  CHECK(sum_squared_adjacency(back) == sum_squared_adjacency(net));
  CHECK(sum_adjacency(back) == sum_adjacency(net));
}

TEST_CASE("degree_stats examples") {
  auto s = degree_stats(path3());
  CHECK(s.max_degree == std::vector<std::int64_t>{1, 2, 1});
  CHECK(s.two_paths == std::vector<std::int64_t>{1, 0, 1});
  CHECK(s.mean_two == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  auto two = MultiRelationalNetwork::from_edges(3, 2, {{0, 0, 1}, {1, 0, 1}, {1, 0, 2}});
  CHECK(degree_stats(two).max_degree == std::vector<std::int64_t>{2, 1, 1});

  auto empty = MultiRelationalNetwork::from_edges(4, 3, {});
  auto z = degree_stats(empty);
  CHECK(z.max_degree == std::vector<std::int64_t>(4, 0));
  CHECK(z.two_paths == std::vector<std::int64_t>(4, 0));
  CHECK(z.mean_two == 0.0);
}

TEST_CASE("sum_squared_adjacency examples") {
  auto k3 = MultiRelationalNetwork::from_edges(3, 1, {{0, 0, 1}, {0, 1, 2}, {0, 0, 2}});
  auto s = sum_squared_adjacency(k3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.at(i, j) == (i == j ? 0 : 1));

  auto p = sum_squared_adjacency(path3());
  CHECK(p.nonzeros() == 2);
  CHECK(p.at(0, 2) == 1);
  CHECK(p.at(2, 0) == 1);

  auto pp = MultiRelationalNetwork::from_edges(3, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 1}, {1, 1, 2}});
  auto q = sum_squared_adjacency(pp);
  CHECK(q.nonzeros() == 2);
  CHECK(q.at(0, 2) == 2);
}

// Values below were produced by tests/oracles/scalar_oracle.py and frozen.
TEST_CASE("prune examples match the scalar oracle") {
  auto c4 = degree_stats(cycle4());
  CHECK(c4.max_degree == std::vector<std::int64_t>{2, 2, 2, 2});
  CHECK(c4.two_paths == std::vector<std::int64_t>{2, 2, 2, 2});
  CHECK(c4.mean_two == 2.0);
  auto r = prune(c4, 4, 1);
  CHECK(r.gamma1 == 2);
  CHECK(r.gamma2 == 3);
  CHECK(r.threshold1 == 2);
  CHECK(r.threshold2 == 2);
  CHECK(r.kept == std::vector<NodeId>{0, 1, 2, 3});

  auto empty = degree_stats(MultiRelationalNetwork::from_edges(5, 2, {}));
  auto e = prune(empty, 5, 2);
  CHECK(e.gamma1 == 5);
  CHECK(e.gamma2 == 5);
  CHECK(e.threshold1 == 0);
  CHECK(e.threshold2 == 0);
  CHECK(e.kept.size() == 5);

  auto p3 = degree_stats(path3());
  CHECK(prune_gamma1(3, 1, p3.mean_two) == 3);
  CHECK(prune_gamma2(3, 1, p3.mean_two) == 3);
  CHECK(code_of([&] { prune(p3, 3, 1); }) == ErrorCode::kDegeneratePruning);

  // Two disjoint 20-cliques.
  std::vector<Edge> edges;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 20; ++i)
      for (int j = i + 1; j < 20; ++j) edges.push_back({0, b * 20 + i, b * 20 + j});
  auto cl = degree_stats(MultiRelationalNetwork::from_edges(40, 1, edges));
  CHECK(cl.mean_two == 342.0);
  auto rc = prune(cl, 40, 1);
  CHECK(rc.gamma1 == 1);
  CHECK(rc.gamma2 == 1);
  CHECK(rc.threshold1 == 19);
  CHECK(rc.threshold2 == 342);
  CHECK(rc.kept.size() == 40);
}

TEST_CASE("gamma clamping and order statistics") {
  CHECK(prune_gamma1(10, 1, 0.0) == 10);
  CHECK(prune_gamma2(10, 1, 0.0) == 10);
  CHECK(prune_gamma1(10, 100, 1e6) == 1);
  CHECK(prune_gamma2(10, 100, 1e6) == 1);
  std::vector<std::int64_t> v{5, 1, 3, 3, 9};
  CHECK(order_statistic(v, 1) == 1);
  CHECK(order_statistic(v, 3) == 3);
  CHECK(order_statistic(v, 4) == 5);
  CHECK(order_statistic(v, 5) == 9);
}

TEST_CASE("submatrix examples") {
  auto s = sum_squared_adjacency(path3());
  std::vector<NodeId> all{0, 1, 2};
  CHECK(submatrix(s, all) == s);
  std::vector<NodeId> one{0};
  auto z = submatrix(s, one);
  CHECK(z.size() == 1);
  CHECK(z.at(0, 0) == 0);
  std::vector<NodeId> ends{0, 2};
  auto e = submatrix(s, ends);
  CHECK(e.size() == 2);
  CHECK(e.at(0, 1) == 1);
  CHECK(e.at(1, 0) == 1);
  CHECK(e.at(0, 0) == 0);
  CHECK(code_of([&] { submatrix(s, std::vector<NodeId>{}); }) == ErrorCode::kDimension);
  CHECK(code_of([&] { submatrix(s, std::vector<NodeId>{2, 0}); }) == ErrorCode::kContract);
}

TEST_CASE("permutation equivariance") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = testing::random_network(40, 3, 0.08, seed);
    auto perm = testing::random_permutation(40, seed);
    auto pnet = net.permuted(perm);
    auto s = sum_squared_adjacency(net);
    auto ps = sum_squared_adjacency(pnet);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 40; ++j) REQUIRE(ps.at(perm[i], perm[j]) == s.at(i, j));

    auto st = degree_stats(net);
    auto pst = degree_stats(pnet);
    try {
      auto k = prune(st, 40, 3);
      auto pk = prune(pst, 40, 3);
      std::set<NodeId> mapped;
      for (NodeId i : k.kept) mapped.insert(perm[i]);
      CHECK(std::set<NodeId>(pk.kept.begin(), pk.kept.end()) == mapped);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegeneratePruning);
      CHECK_THROWS_AS(prune(pst, 40, 3), Error);
    }
  }
}

TEST_CASE("sum of squares is PSD before diagonal zeroing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto net = testing::random_network(50, 4, 0.1, seed + 100);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(50, 50);
    for (std::size_t t = 0; t < 4; ++t) {
      auto a = testing::dense_layer(net, t);
      full += a * a;
    }
    // The library matrix is the full square with its diagonal removed.
    auto lib = sum_squared_adjacency(net);
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0; j < 50; ++j)
        REQUIRE(lib.at(i, j) == (i == j ? 0.0 : full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    Rng rng(seed, 11);
    for (int r = 0; r < 100; ++r) {
      Eigen::VectorXd x(50);
      for (int i = 0; i < 50; ++i) x[i] = rng.normal(0.0, 1.0);
      CHECK(x.dot(full * x) >= -1e-9);
    }
  }
}

TEST_CASE("additivity over layers") {
  auto net = testing::random_network(35, 4, 0.12, 77);
  auto total = sum_squared_adjacency(net);
  std::vector<std::int64_t> acc(35 * 35, 0);
  for (std::size_t t = 0; t < 4; ++t) {
    MultiRelationalNetwork single(35, {net.layer(t)});
    auto s = sum_squared_adjacency(single);
    for (std::size_t i = 0; i < 35; ++i)
      for (std::size_t j = 0; j < 35; ++j) acc[i * 35 + j] += s.at(i, j);
  }
  for (std::size_t i = 0; i < 35; ++i)
    for (std::size_t j = 0; j < 35; ++j) REQUIRE(total.at(i, j) == acc[i * 35 + j]);

  // Layer order does not matter.
  std::vector<AdjacencyLayer> rev(net.layers().rbegin(), net.layers().rend());
  CHECK(sum_squared_adjacency(MultiRelationalNetwork(35, rev)) == total);
}

TEST_CASE("two-path counts match brute-force enumeration") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 5 + seed % 16;
    auto net = testing::random_network(n, 3, 0.3, seed + 500);
    auto stats = degree_stats(net);
    auto sq = sum_squared_adjacency(net);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t paths = 0;
      std::int64_t maxdeg = 0;
      for (std::size_t t = 0; t < 3; ++t) {
        const auto& layer = net.layer(t);
        std::int64_t deg = 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (!layer.has_edge(static_cast<NodeId>(i), static_cast<NodeId>(k))) continue;
          ++deg;
          for (std::size_t j = 0; j < n; ++j) {
            if (j != i && layer.has_edge(static_cast<NodeId>(k), static_cast<NodeId>(j))) ++paths;
          }
        }
        maxdeg = std::max(maxdeg, deg);
      }
      CHECK(stats.two_paths[i] == paths);
      CHECK(sq.row_sum(i) == paths);
      CHECK(stats.max_degree[i] == maxdeg);
      total += paths;
    }
    CHECK(stats.total_two_paths == total);
    CHECK(stats.mean_two == doctest::Approx(static_cast<double>(total) / (3.0 * n)));
  }
}

TEST_CASE("worker count does not change the result") {
  auto net = testing::random_network(300, 5, 0.03, 9);
  auto base = sum_squared_adjacency(net, 1);
  for (unsigned w : {2u, 3u, 4u, 7u, 16u}) CHECK(sum_squared_adjacency(net, w) == base);
}

TEST_CASE("multiply matches a dense product") {
  auto net = testing::random_network(60, 2, 0.1, 3);
  auto sq = sum_squared_adjacency(net);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(60, 60);
  for (std::size_t t = 0; t < 2; ++t) {
    auto a = testing::dense_layer(net, t);
    dense += a * a;
  }
  dense.diagonal().setZero();
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(60, -1.0, 2.0);
  Eigen::VectorXd y(60);
  sq.multiply(std::span<const double>(x.data(), 60), std::span<double>(y.data(), 60));
  CHECK((y - dense * x).norm() < 1e-9);
}

TEST_CASE("from_edges validates") {
  CHECK(code_of([] { MultiRelationalNetwork::from_edges(3, 1, {{0, 1, 1}}); }) == ErrorCode::kSelfLoop);
  CHECK(code_of([] { MultiRelationalNetwork::from_edges(3, 1, {{0, 1, 3}}); }) == ErrorCode::kBounds);
  CHECK(code_of([] { MultiRelationalNetwork::from_edges(3, 1, {{1, 0, 1}}); }) == ErrorCode::kBounds);
}
