#include "mlsc/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsc/error.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

Eigen::MatrixXd Membership::one_hot() const {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), communities);
  for (std::size_t i = 0; i < labels.size(); ++i) z(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return z;
}

std::vector<std::size_t> Membership::community_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(communities, 0)), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

void Membership::validate() const {
  if (communities < 1) throw Error(ErrorCode::kParameter, "membership needs at least one community");
  for (int l : labels) {
    if (l < 0 || l >= communities) {
      throw Error(ErrorCode::kBounds, "label " + std::to_string(l) + " outside [0, " +
                                          std::to_string(communities) + ")");
    }
  }
}

void BlockSchedule::validate() const {
  for (std::size_t t = 0; t < mats.size(); ++t) {
    const auto& b = mats[t];
    if (b.rows() != communities || b.cols() != communities) {
      throw Error(ErrorCode::kDimension, "B^(" + std::to_string(t + 1) + ") is not K x K");
    }
    for (int a = 0; a < communities; ++a) {
      for (int c = 0; c < communities; ++c) {
        if (b(a, c) != b(c, a)) {
          throw Error(ErrorCode::kParameter, "B^(" + std::to_string(t + 1) + ") is not symmetric");
        }
        if (!(b(a, c) >= 0.0 && b(a, c) <= 1.0)) {
          throw Error(ErrorCode::kParameter, "B^(" + std::to_string(t + 1) + ")[" +
                                                 std::to_string(a + 1) + "," + std::to_string(c + 1) +
                                                 "] is not a probability");
        }
      }
    }
  }
}

void ModelParams::validate() const {
  const int k = communities();
  if (k < 1) throw Error(ErrorCode::kParameter, "K must be at least 1");
  if (pi.size() != k) throw Error(ErrorCode::kDimension, "pi must have K entries");
  if ((pi.array() <= 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kParameter, "pi must be a positive probability vector");
  }
  schedule.validate();
  if (psi) {
    if (psi->size() != nodes) throw Error(ErrorCode::kDimension, "psi must have n entries");
    for (double v : *psi) {
      if (!(v > 0.0)) throw Error(ErrorCode::kParameter, "psi entries must be positive");
    }
  }
}

Membership sample_memberships(std::size_t n, const Eigen::VectorXd& pi, std::uint64_t seed) {
  if (pi.size() == 0) throw Error(ErrorCode::kParameter, "K must be at least 1");
  if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kParameter, "pi must be a normalized probability vector");
  }
  Membership m;
  m.communities = static_cast<int>(pi.size());
  m.labels.resize(n);
  Rng rng(seed, 0);
  for (auto& label : m.labels) {
    const double u = rng.uniform();
    double acc = 0.0;
    int chosen = m.communities - 1;
    for (int a = 0; a < m.communities; ++a) {
      acc += pi[a];
      if (u < acc) {
        chosen = a;
        break;
      }
    }
    // Rounding in the cumulative sum must not land on a zero-mass category.
    while (pi[chosen] <= 0.0 && chosen > 0) --chosen;
    label = chosen;
  }
  return m;
}

std::vector<double> normalize_psi(const Membership& labels, const std::vector<double>& alpha) {
  labels.validate();
  if (alpha.size() != labels.size()) throw Error(ErrorCode::kDimension, "alpha must have n entries");
  std::vector<double> peak(static_cast<std::size_t>(labels.communities), 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw Error(ErrorCode::kParameter, "alpha entries must be positive");
    auto& m = peak[static_cast<std::size_t>(labels.labels[i])];
    m = std::max(m, alpha[i]);
  }
  for (std::size_t a = 0; a < peak.size(); ++a) {
    if (peak[a] == 0.0) {
      throw Error(ErrorCode::kEmptyCommunity, "community " + std::to_string(a + 1) + " is empty");
    }
  }
  std::vector<double> psi(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    psi[i] = alpha[i] / peak[static_cast<std::size_t>(labels.labels[i])];
  }
  return psi;
}

std::vector<double> sample_uniform_psi(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (!(lo > 0.0 && hi >= lo)) throw Error(ErrorCode::kParameter, "psi range must satisfy 0 < lo <= hi");
  Rng rng(seed, 0);
  std::vector<double> psi(n);
  for (auto& v : psi) v = rng.uniform(lo, hi);
  return psi;
}

namespace {

// Maps a linear index over the unordered pairs of an m-element set to (r, c), r < c,
// enumerating pairs column by column: (0,1), (0,2), (1,2), (0,3), ...
std::pair<std::uint64_t, std::uint64_t> triangular_pair(std::uint64_t k) {
  auto c = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (c * (c - 1) / 2 > k) --c;
  while ((c + 1) * c / 2 <= k) ++c;
  return {k - c * (c - 1) / 2, c};
}

// Geometric skipping over `total` candidate slots, each selected with
// probability p independently. Calls visit(index) for each selected slot.
template <class Visit>
void bernoulli_skip(std::uint64_t total, double p, Rng& rng, Visit&& visit) {
  if (total == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < total; ++k) visit(k);
    return;
  }
  const double log_q = std::log1p(-p);
  double pos = -1.0;
  const auto limit = static_cast<double>(total);
  while (true) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    pos += 1.0 + std::floor(std::log(u) / log_q);
    if (pos >= limit) break;
    visit(static_cast<std::uint64_t>(pos));
  }
}

void check_probabilities(const ModelParams& params, const std::vector<std::vector<NodeId>>& members) {
  const int k = params.communities();
  std::vector<double> peak(static_cast<std::size_t>(k), 1.0);
  if (params.psi) {
    std::fill(peak.begin(), peak.end(), 0.0);
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (NodeId i : members[a]) peak[a] = std::max(peak[a], (*params.psi)[i]);
    }
  }
  for (std::size_t t = 0; t < params.schedule.layer_count(); ++t) {
    const auto& b = params.schedule.mats[t];
    for (int a = 0; a < k; ++a) {
      for (int c = a; c < k; ++c) {
        const double p = b(a, c) * peak[a] * peak[c];
        if (p > 1.0 + 1e-12) {
          throw Error(ErrorCode::kParameter, "edge probability exceeds 1 at (t,a,b)=(" +
                                                 std::to_string(t + 1) + "," + std::to_string(a + 1) +
                                                 "," + std::to_string(c + 1) + ")");
        }
      }
    }
  }
}

}  // namespace

MultiRelationalNetwork sample_network(const ModelParams& params, const Membership& labels,
                                      std::uint64_t seed) {
  params.validate();
  labels.validate();
  if (labels.communities != params.communities()) {
    throw Error(ErrorCode::kDimension, "membership and schedule disagree on K");
  }
  const std::size_t n = labels.size();
  if (params.psi && params.psi->size() != n) throw Error(ErrorCode::kDimension, "psi must have n entries");

  const int k = params.communities();
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) members[labels.labels[i]].push_back(static_cast<NodeId>(i));
  check_probabilities(params, members);

  std::vector<double> peak(static_cast<std::size_t>(k), 1.0);
  if (params.psi) {
    std::fill(peak.begin(), peak.end(), 0.0);
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (NodeId i : members[a]) peak[a] = std::max(peak[a], (*params.psi)[i]);
    }
  }

  std::vector<AdjacencyLayer> layers;
  layers.reserve(params.schedule.layer_count());
  for (std::size_t t = 0; t < params.schedule.layer_count(); ++t) {
    Rng rng(seed, t + 1);
    const auto& b = params.schedule.mats[t];
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int a = 0; a < k; ++a) {
      for (int c = a; c < k; ++c) {
        const auto& ma = members[a];
        const auto& mc = members[c];
        // Candidate rate: the block maximum; degree-corrected pairs are thinned.
        const double rate = b(a, c) * peak[a] * peak[c];
        auto emit = [&](NodeId u, NodeId v) {
          if (params.psi) {
            const double keep = (*params.psi)[u] * (*params.psi)[v] / (peak[a] * peak[c]);
            if (keep < 1.0 && rng.uniform() >= keep) return;
          }
          edges.emplace_back(u, v);
        };
        if (a == c) {
          const std::uint64_t m = ma.size();
          bernoulli_skip(m * (m - (m > 0 ? 1 : 0)) / 2, rate, rng, [&](std::uint64_t idx) {
            const auto [r, s] = triangular_pair(idx);
            emit(ma[r], ma[s]);
          });
        } else {
          const std::uint64_t width = mc.size();
          bernoulli_skip(ma.size() * width, rate, rng, [&](std::uint64_t idx) {
            emit(ma[idx / width], mc[idx % width]);
          });
        }
      }
    }
    layers.emplace_back(n, std::move(edges));
  }
  return MultiRelationalNetwork(n, std::move(layers));
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kScenarioCommunities = 4;

double clamp_probability(double v, std::size_t& clamped) {
  if (v < 0.0) {
    ++clamped;
    return 0.0;
  }
  if (v > 1.0) {
    ++clamped;
    return 1.0;
  }
  return v;
}

// I_2 (x) J_2: two diagonal 2 x 2 all-ones blocks.
Eigen::MatrixXd paired_blocks() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m.block(0, 0, 2, 2).setOnes();
  m.block(2, 2, 2, 2).setOnes();
  return m;
}

}  // namespace

BlockSchedule scenario_schedule(int id, ModelVariant variant, std::size_t n, std::size_t layers,
                                std::uint64_t seed, int form) {
  if (n < 2) throw Error(ErrorCode::kParameter, "scenario schedules need n >= 2");
  if (layers < 1) throw Error(ErrorCode::kParameter, "scenario schedules need T >= 1");
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(layers);
  const auto eye = Eigen::MatrixXd::Identity(4, 4);
  const auto ones = Eigen::MatrixXd::Ones(4, 4);

  // Raw (unclamped) schedule values; clamping happens once at the end.
  std::vector<Eigen::MatrixXd> raw;
  raw.reserve(layers);
  switch (id) {
    case 1: {
      double scale;
      if (form == 1) {
        scale = 3.0 * std::pow(std::log(nd), 0.75) / nd;
      } else if (form == 2) {
        scale = (variant == ModelVariant::kSbm ? 5.0 : 10.0) / nd;
      } else {
        throw Error(ErrorCode::kParameter, "scenario 1 form must be 1 or 2");
      }
      const Eigen::MatrixXd pairs = paired_blocks();
      for (std::size_t t = 1; t <= layers; ++t) {
        const double b = -1.0 + 0.2 * static_cast<double>(t - 1);
        raw.push_back(scale * (pairs + b * eye));
      }
      break;
    }
    case 2: {
      const double c = (variant == ModelVariant::kSbm ? std::pow(std::log(nd), 4.0 / 3.0)
                                                      : std::pow(std::log(nd), 1.5)) / nd;
      for (std::size_t t = 1; t <= layers; ++t) {
        if (t == 1) {
          raw.push_back(c * (ones - eye));
        } else if (t == 2) {
          raw.push_back(c * ones);
        } else {
          raw.push_back((c / td) * ones);
        }
      }
      break;
    }
    case 3: {
      if (layers < 5) throw Error(ErrorCode::kParameter, "scenario 3 needs T >= 5");
      const double base = variant == ModelVariant::kSbm ? 7.0 : 12.0;
      const double noise_sd = std::sqrt(0.05);
      for (std::size_t t = 1; t <= layers; ++t) {
        if (t <= 5) {
          const double b = -base + base * static_cast<double>(t - 1) / td;
          raw.push_back((2.0 * eye + b * ones) / nd);
        } else {
          Rng rng(seed, t);
          const double eps = rng.normal(0.0, noise_sd);
          const Eigen::MatrixXd& prev = raw[t - 6];
          Eigen::MatrixXd next(4, 4);
          for (int a = 0; a < 4; ++a) {
            for (int c = 0; c < 4; ++c) {
              next(a, c) = 20.0 / (nd * (1.0 + std::exp(nd * prev(a, c) + eps)));
            }
          }
          raw.push_back(std::move(next));
        }
      }
      break;
    }
    default:
      throw Error(ErrorCode::kParameter, "scenario id must be 1, 2 or 3");
  }

  BlockSchedule s;
  s.communities = kScenarioCommunities;
  s.mats.reserve(layers);
  for (auto& m : raw) {
    Eigen::MatrixXd clamped = m;
    for (Eigen::Index i = 0; i < clamped.size(); ++i) {
      clamped.data()[i] = clamp_probability(clamped.data()[i], s.clamped_entries);
    }
    s.mats.push_back(std::move(clamped));
  }
  return s;
}

ModelParams scenario_params(int id, ModelVariant variant, std::size_t n, std::size_t layers,
                            std::uint64_t seed, int form) {
  ModelParams p;
  p.nodes = n;
  p.pi = Eigen::VectorXd::Constant(kScenarioCommunities, 1.0 / kScenarioCommunities);
  p.schedule = scenario_schedule(id, variant, n, layers, derive_seed(seed, 0x5c4ed), form);
  if (variant == ModelVariant::kDcbm) {
    p.psi = sample_uniform_psi(n, 0.5, 1.0, derive_seed(seed, 0x9517));
  }
  return p;
}

Eigen::MatrixXd edge_probabilities(const ModelParams& params, const Membership& labels,
                                   std::size_t layer) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto& b = params.schedule.mats.at(layer);
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = b(labels.labels[i], labels.labels[j]);
      if (params.psi) v *= (*params.psi)[i] * (*params.psi)[j];
      p(i, j) = i == j ? 0.0 : v;
    }
  }
  return p;
}

Eigen::MatrixXd expected_sum_squares(const ModelParams& params, const Membership& labels) {
  params.validate();
  labels.validate();
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < params.schedule.layer_count(); ++t) {
    const Eigen::MatrixXd p = edge_probabilities(params, labels, t);
    // With a zero diagonal in P, (P^2)_ij already excludes k = i and k = j.
    acc.noalias() += p * p;
  }
  acc.diagonal().setZero();
  return acc;
}

}  // namespace mlsc
