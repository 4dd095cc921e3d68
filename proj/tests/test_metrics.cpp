#include <doctest.h>

#include <algorithm>

#include "mlsc/error.hpp"
#include "mlsc/metrics.hpp"
#include "mlsc/rng.hpp"

using namespace mlsc;

namespace {

std::vector<int> random_labels(std::size_t n, int k, std::uint64_t seed) {
  Rng rng(seed, 2);
  std::vector<int> l(n);
  for (auto& v : l) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return l;
}

}  // namespace

TEST_CASE("nmi examples") {
  std::vector<int> t{0, 0, 1, 1, 2, 2};
  CHECK(nmi(t, t) == doctest::Approx(1.0));
  CHECK(nmi(t, {2, 2, 0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(std::abs(nmi({0, 0, 1, 1}, {0, 1, 0, 1})) < 1e-15);
  CHECK(nmi({0, 0, 0}, {1, 1, 1}) == 1.0);
  CHECK(nmi({0, 0, 0}, {0, 1, 1}) == 0.0);
  CHECK_THROWS_AS(nmi({0, 1}, {0}), Error);
}

TEST_CASE("nmi symmetry and range") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto a = random_labels(200, 4, seed);
    auto b = random_labels(200, 3, seed + 1000);
    const double ab = nmi(a, b);
    CHECK(ab == nmi(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("misclassification examples") {
  Membership truth{2, std::vector<int>(100)};
  for (int i = 50; i < 100; ++i) truth.labels[i] = 1;
  auto same = misclassification(truth, truth);
  CHECK(same.overall_error == 0.0);
  CHECK(same.per_community == std::vector<double>{0.0, 0.0});
  CHECK(same.nmi == doctest::Approx(1.0));

  Membership flipped = truth;
  for (int i = 0; i < 5; ++i) flipped.labels[i] = 1;
  auto f = misclassification(truth, flipped);
  CHECK(f.overall_error == doctest::Approx(0.05));
  CHECK(f.per_community[0] == doctest::Approx(0.1));
  CHECK(f.per_community[1] == 0.0);
  CHECK(f.confusion(0, 1) == 5);

  Membership swapped = truth;
  for (auto& l : swapped.labels) l = 1 - l;
  auto s = misclassification(truth, swapped);
  CHECK(s.overall_error == 0.0);
  CHECK(s.permutation == std::vector<int>{1, 0});
}

TEST_CASE("K mismatch pads the confusion matrix") {
  Membership truth{2, {0, 0, 1, 1}};
  Membership est{3, {0, 0, 1, 2}};
  auto r = misclassification(truth, est);
  CHECK(r.confusion.rows() == 3);
  CHECK(r.overall_error == doctest::Approx(0.25));
  CHECK(r.per_community.size() == 2);
}

TEST_CASE("bijection invariance") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Membership truth{4, random_labels(150, 4, seed)};
    // A noisy copy keeps the optimal bijection unique.
    Membership est = truth;
    auto noise = random_labels(150, 4, seed + 77);
    for (std::size_t i = 0; i < 150; i += 4) est.labels[i] = noise[i];
    auto base = misclassification(truth, est);
    std::vector<int> sigma{0, 1, 2, 3};
    Rng rng(seed, 9);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    Membership moved = est;
    for (auto& l : moved.labels) l = sigma[l];
    auto r = misclassification(truth, moved);
    CHECK(r.overall_error == base.overall_error);
    CHECK(r.per_community == base.per_community);
    CHECK(r.nmi == doctest::Approx(base.nmi).epsilon(1e-14));
  }
}

TEST_CASE("Hungarian matches brute force") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int k = 1 + static_cast<int>(seed % 4);
    Rng rng(seed, 4);
    Eigen::MatrixXd w(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) w(i, j) = static_cast<double>(rng.below(20));
    auto h = max_weight_assignment(w);
    auto b = max_weight_assignment_exhaustive(w);
    double hs = 0, bs = 0;
    for (int i = 0; i < k; ++i) {
      hs += w(i, h[i]);
      bs += w(i, b[i]);
    }
    CHECK(hs == bs);
    std::vector<int> sorted = h;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("large K uses the assignment solver") {
  const int k = 12;
  std::vector<int> t(240);
  for (int i = 0; i < 240; ++i) t[i] = i % k;
  std::vector<int> e(240);
  for (int i = 0; i < 240; ++i) e[i] = (t[i] * 5 + 3) % k;
  e[0] = (e[0] + 1) % k;
  auto r = misclassification(Membership{k, t}, Membership{k, e});
  CHECK(r.overall_error == doctest::Approx(1.0 / 240.0));
}
