#include "mlsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mlsc/error.hpp"

namespace mlsc {

namespace {

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / total) * std::log(c / total);
  }
  return h;
}

// Dense relabeling 0..k-1 in order of first appearance.
std::vector<int> compact(const std::vector<int>& labels, int& k) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  k = static_cast<int>(ids.size());
  return out;
}

}  // namespace

double nmi(const std::vector<int>& truth, const std::vector<int>& est) {
  if (truth.size() != est.size()) throw Error(ErrorCode::kContract, "label vectors differ in length");
  if (truth.empty()) return 1.0;
  int kx = 0, ky = 0;
  const auto x = compact(truth, kx);
  const auto y = compact(est, ky);
  const double n = static_cast<double>(truth.size());

  std::vector<double> joint(static_cast<std::size_t>(kx) * ky, 0.0);
  std::vector<double> px(static_cast<std::size_t>(kx), 0.0), py(static_cast<std::size_t>(ky), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[static_cast<std::size_t>(x[i]) * ky + y[i]] += 1.0;
    px[x[i]] += 1.0;
    py[y[i]] += 1.0;
  }
  const double hx = entropy(px, n);
  const double hy = entropy(py, n);
  if (hx == 0.0 || hy == 0.0) {
    // Identical set partitions have the same first-appearance relabeling.
    return x == y ? 1.0 : 0.0;
  }
  // Terms are summed in sorted order so that nmi(x, y) == nmi(y, x) bitwise.
  std::vector<double> terms;
  for (int a = 0; a < kx; ++a) {
    for (int b = 0; b < ky; ++b) {
      const double c = joint[static_cast<std::size_t>(a) * ky + b];
      if (c > 0.0) terms.push_back((c / n) * std::log(c * n / (px[a] * py[b])));
    }
  }
  std::sort(terms.begin(), terms.end());
  const double mi = std::accumulate(terms.begin(), terms.end(), 0.0);
  return std::clamp(mi / std::sqrt(hx * hy), 0.0, 1.0);
}

Eigen::MatrixXi confusion_matrix(const std::vector<int>& truth, const std::vector<int>& est, int size) {
  if (truth.size() != est.size()) throw Error(ErrorCode::kContract, "label vectors differ in length");
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(size, size);
  for (std::size_t i = 0; i < truth.size(); ++i) ++c(truth[i], est[i]);
  return c;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  // Shortest augmenting path formulation on cost = -weight, 1-based potentials.
  const int n = static_cast<int>(weight.rows());
  if (weight.cols() != n) throw Error(ErrorCode::kDimension, "assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<int> max_weight_assignment_exhaustive(const Eigen::MatrixXd& weight) {
  const int n = static_cast<int>(weight.rows());
  if (weight.cols() != n) throw Error(ErrorCode::kDimension, "assignment needs a square matrix");
  if (n > 10) throw Error(ErrorCode::kSize, "exhaustive assignment is limited to 10 labels");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_w = -std::numeric_limits<double>::infinity();
  do {
    double w = 0.0;
    for (int r = 0; r < n; ++r) w += weight(r, perm[r]);
    if (w > best_w) {
      best_w = w;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

EvalReport misclassification(const Membership& truth, const Membership& est) {
  truth.validate();
  est.validate();
  if (truth.size() != est.size()) throw Error(ErrorCode::kContract, "memberships differ in length");
  const int size = std::max(truth.communities, est.communities);
  EvalReport r;
  r.confusion = confusion_matrix(truth.labels, est.labels, size);

  // Match estimated labels (columns) to true labels (rows) maximizing the trace.
  const Eigen::MatrixXd weight = r.confusion.transpose().cast<double>();
  const auto est_to_true = size <= 10 ? max_weight_assignment_exhaustive(weight)
                                      : max_weight_assignment(weight);
  r.permutation = est_to_true;

  std::vector<std::size_t> wrong(static_cast<std::size_t>(truth.communities), 0);
  std::size_t total_wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (est_to_true[est.labels[i]] != truth.labels[i]) {
      ++wrong[truth.labels[i]];
      ++total_wrong;
    }
  }
  const auto sizes = truth.community_sizes();
  r.per_community.resize(sizes.size());
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    r.per_community[a] = sizes[a] == 0 ? 0.0 : static_cast<double>(wrong[a]) / static_cast<double>(sizes[a]);
  }
  r.overall_error = truth.size() == 0 ? 0.0 : static_cast<double>(total_wrong) / static_cast<double>(truth.size());
  r.nmi = nmi(truth.labels, est.labels);
  return r;
}

}  // namespace mlsc
