// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mlsc/cluster.hpp"
#include "mlsc/experiment.hpp"
#include "mlsc/genmodel.hpp"
#include "mlsc/metrics.hpp"
#include "mlsc/netcore.hpp"
#include "mlsc/pipeline.hpp"
#include "mlsc/spectral.hpp"
#include "test_support.hpp"

using namespace mlsc;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d  %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs, limit_seconds, in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Mean NMI per (sweep value, method) from an experiment table; failed rows count as 0.
double mean_nmi(const ResultsTable& t, double sweep, ExperimentMethod m) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : t.rows) {
    if (r.sweep_value != sweep || r.method != m) continue;
    sum += r.nmi.value_or(0.0);
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::size_t failed_rows(const ResultsTable& t) {
  std::size_t f = 0;
  for (const auto& r : t.rows) f += r.status != "ok";
  return f;
}

}  // namespace

int main() {
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  criterion(1, "Pruning arithmetic on C4", 1, [] {
    auto net = MultiRelationalNetwork::from_edges(4, 1, {{0, 0, 1}, {0, 1, 2}, {0, 2, 3}, {0, 3, 0}});
    auto r = prune(degree_stats(net), 4, 1);
    // Frozen output of tests/oracles/scalar_oracle.py.
    const bool ok = r.gamma1 == 2 && r.gamma2 == 3 && r.threshold1 == 2 && r.threshold2 == 2 &&
                    r.kept == std::vector<NodeId>{0, 1, 2, 3};
    return Outcome{ok, "gamma=(" + std::to_string(r.gamma1) + "," + std::to_string(r.gamma2) +
                           ") thresholds=(" + std::to_string(r.threshold1) + "," +
                           std::to_string(r.threshold2) + ") kept=" + std::to_string(r.kept.size())};
  });

  criterion(2, "Eigensolver vs dense Jacobi oracle", 30, [] {
    double worst_value = 0.0, worst_resid = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>((seed * 37) % 63);
      const int k = 1 + static_cast<int>(seed % std::min<Eigen::Index>(n, 6));
      auto m = testing::random_symmetric_integer(n, seed % 2 ? -4 : 0, 5, seed);
      auto oracle = testing::jacobi_eigen(m).first;
      auto e = top_k_eigenpairs(m, k, seed);
      for (int c = 0; c < k; ++c) {
        worst_value = std::max(worst_value, std::abs(e.values[c] - oracle[c]));
        const double r = (m * e.vectors.col(c) - e.values[c] * e.vectors.col(c)).norm();
        worst_resid = std::max(worst_resid, r / std::max(1.0, std::abs(e.values[c])));
      }
    }
    return Outcome{worst_value <= 1e-8 && worst_resid <= 1e-6,
                   "max |dlambda|=" + sci(worst_value) + " max rel residual=" + sci(worst_resid)};
  });

  criterion(3, "K-means (1+eps) contract vs exact enumeration", 60, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const int m = 3 + static_cast<int>(seed % 8);
      const int d = 1 + static_cast<int>((seed / 8) % 3);
      const int k = 1 + static_cast<int>((seed / 2) % 3);
      Rng rng(seed, 17);
      Eigen::MatrixXd p(m, d);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) p(i, j) = rng.normal(0.0, 1.0) + (i % 3) * 2.0;
      const double exact = kmeans_exact(p, k).cost;
      const double approx = kmeans_approx(p, k, 0.5, seed).cost;
      worst = std::max(worst, exact > 0 ? approx / exact : (approx > 1e-12 ? INFINITY : 1.0));
    }
    return Outcome{worst <= 1.5, "worst approx/exact=" + fmt(worst)};
  });

  criterion(4, "Population oracle, Scenario 1 t=1 matrix, n=400", 10, [] {
    const std::size_t n = 400;
    auto params = scenario_params(1, ModelVariant::kSbm, n, 1, 0);
    Membership labels{4, {}};
    for (std::size_t i = 0; i < n; ++i) labels.labels.push_back(static_cast<int>(i % 4));
    const auto ex = expected_sum_squares(params, labels);
    std::vector<NodeId> kept(n);
    std::iota(kept.begin(), kept.end(), 0);
    auto r = cluster_matrix(ex, kept, 4, false, {});
    const auto report = misclassification(labels, r.membership);
    const auto wrong = static_cast<std::size_t>(std::lround(report.overall_error * n));
    return Outcome{wrong == 0, "misclassified kept nodes=" + std::to_string(wrong)};
  });

  criterion(5, "Scenario 1 SBM, T=11, 10 replications", 600, [jobs] {
    ExperimentConfig c;
    c.scenario = 1;
    c.sweep_name = "n";
    c.sweep_values = {500, 1000, 2000};
    c.fixed_t = 11;
    c.methods = {ExperimentMethod::kAlg1};
    c.replications = 10;
    auto t = run_experiment(c, jobs);
    const double a500 = mean_nmi(t, 500, ExperimentMethod::kAlg1);
    const double a1000 = mean_nmi(t, 1000, ExperimentMethod::kAlg1);
    const double a2000 = mean_nmi(t, 2000, ExperimentMethod::kAlg1);
    return Outcome{a1000 >= 0.8 && a2000 >= a500 - 0.05,
                   "mean NMI n=500 " + fmt(a500) + ", n=1000 " + fmt(a1000) + " (need >= 0.8), n=2000 " +
                       fmt(a2000) + "; failed rows " + std::to_string(failed_rows(t))};
  });

  criterion(6, "Scenario 2 SBM, n=2000, T=11, 10 replications", 600, [jobs] {
    ExperimentConfig c;
    c.scenario = 2;
    c.sweep_name = "n";
    c.sweep_values = {2000};
    c.fixed_t = 11;
    c.methods = {ExperimentMethod::kAlg1, ExperimentMethod::kBaselineSum};
    c.replications = 10;
    auto t = run_experiment(c, jobs);
    const double a = mean_nmi(t, 2000, ExperimentMethod::kAlg1);
    const double b = mean_nmi(t, 2000, ExperimentMethod::kBaselineSum);
    return Outcome{a >= 0.7 && b <= 0.4, "mean NMI Alg1 " + fmt(a) + " (need >= 0.7), BaselineSum " +
                                             fmt(b) + " (need <= 0.4)"};
  });

  criterion(7, "Algorithm 3, Scenario 1 SBM, n=4000, T=11, 25 replications", 900, [jobs] {
    ExperimentConfig c;
    c.scenario = 1;
    c.sweep_name = "n";
    c.sweep_values = {4000};
    c.fixed_t = 11;
    c.methods = {ExperimentMethod::kAlg3};
    c.replications = 25;
    auto t = run_experiment(c, jobs);
    std::size_t hits = 0;
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& r : t.rows) {
      if (r.k_hat) {
        hits += *r.k_hat == 4;
        ++histogram[*r.k_hat];
      }
    }
    std::string h;
    for (auto [k, count] : histogram) h += " K^=" + std::to_string(k) + ":" + std::to_string(count);
    return Outcome{hits * 5 >= 25 * 4, std::to_string(hits) + "/25 with K^=4 (need >= 20);" + h};
  });

  criterion(8, "Multilayer gain, K=2, B=(3J+3I)/n, n=1000", 600, [jobs] {
    ExperimentConfig c;
    c.scenario = 0;
    ParamsDocument doc;
    doc.params.nodes = 1000;
    doc.params.pi = Eigen::Vector2d(0.5, 0.5);
    doc.params.schedule.communities = 2;
    doc.params.schedule.mats = {(3.0 * Eigen::MatrixXd::Ones(2, 2) + 3.0 * Eigen::MatrixXd::Identity(2, 2)) / 1000.0};
    c.custom = doc;
    c.communities = 2;
    c.sweep_name = "T";
    c.sweep_values = {1, 100};
    c.fixed_n = 1000;
    c.methods = {ExperimentMethod::kAlg1};
    c.replications = 10;
    auto t = run_experiment(c, jobs);
    const double one = mean_nmi(t, 1, ExperimentMethod::kAlg1);
    const double hundred = mean_nmi(t, 100, ExperimentMethod::kAlg1);
    return Outcome{one <= 0.2 && hundred >= 0.9,
                   "mean NMI T=1 " + fmt(one) + " (need <= 0.2), T=100 " + fmt(hundred) + " (need >= 0.9)"};
  });

  criterion(9, "Generator block frequencies, K=2, n=2000, 20 seeds", 60, [] {
    ModelParams p;
    p.nodes = 2000;
    p.pi = Eigen::Vector2d(0.4, 0.6);
    p.schedule.communities = 2;
    Eigen::MatrixXd b(2, 2);
    b << 0.05, 0.01, 0.01, 0.03;
    p.schedule.mats = {b};
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto labels = sample_memberships(2000, p.pi, seed);
      auto net = sample_network(p, labels, seed + 1000);
      const auto sizes = labels.community_sizes();
      double edges[2][2] = {{0, 0}, {0, 0}};
      for (std::size_t i = 0; i < 2000; ++i)
        for (NodeId j : net.layer(0).neighbors(static_cast<NodeId>(i)))
          if (static_cast<std::size_t>(j) > i) {
            const int a = std::min(labels.labels[i], labels.labels[j]), c = std::max(labels.labels[i], labels.labels[j]);
            edges[a][c] += 1;
          }
      for (int a = 0; a < 2; ++a)
        for (int c = a; c < 2; ++c) {
          const double pairs = a == c ? sizes[a] * (sizes[a] - 1.0) / 2.0 : double(sizes[a]) * sizes[c];
          const double se = std::sqrt(b(a, c) * (1 - b(a, c)) / pairs);
          worst = std::max(worst, std::abs(edges[a][c] / pairs - b(a, c)) / se);
        }
    }
    return Outcome{worst <= 5.0, "max |freq - B| / SE = " + fmt(worst)};
  });

  criterion(10, "Scenario 3 SBM, n=1000, T=5 vs T=55, 10 replications", 600, [jobs] {
    ExperimentConfig c;
    c.scenario = 3;
    c.sweep_name = "T";
    c.sweep_values = {5, 55};
    c.fixed_n = 1000;
    c.methods = {ExperimentMethod::kAlg1};
    c.replications = 10;
    auto t = run_experiment(c, jobs);
    const double five = mean_nmi(t, 5, ExperimentMethod::kAlg1);
    const double late = mean_nmi(t, 55, ExperimentMethod::kAlg1);
    return Outcome{late >= five, "mean NMI T=5 " + fmt(five) + ", T=55 " + fmt(late)};
  });

  criterion(11, "experiment rerun gives byte-identical CSV apart from seconds", 120, [] {
    const char* cli = std::getenv("MLSC_CLI");
    if (!cli) return Outcome{false, "MLSC_CLI not set"};
    const auto dir = std::filesystem::temp_directory_path() / "mlsc_acceptance";
    std::filesystem::create_directories(dir);
    json cfg{{"scenario", 1},
             {"variant", "DCBM"},
             {"sweep", {{"name", "n"}, {"values", {300, 600}}}},
             {"fixed", {{"T", 6}}},
             {"methods", {"Alg1", "Alg2", "Alg3", "BaselineSum", "BaselineSpectralSum"}},
             {"replications", 3},
             {"base_seed", 12345}};
    std::ofstream(dir / "config.json") << cfg.dump(2);
    std::string csv[2];
    for (int run = 0; run < 2; ++run) {
      const auto out = dir / ("run" + std::to_string(run) + ".csv");
      const std::string cmd = std::string(cli) + " experiment --config " + (dir / "config.json").string() +
                              " --jobs " + std::to_string(run + 1) + " -o " + out.string();
      if (std::system(cmd.c_str()) != 0) return Outcome{false, "experiment command failed"};
      std::ifstream in(out);
      for (std::string line; std::getline(in, line);) csv[run] += line.substr(0, line.rfind(',')) + "\n";
    }
    std::filesystem::remove_all(dir);
    const auto rows = std::count(csv[0].begin(), csv[0].end(), '\n') - 1;
    return Outcome{csv[0] == csv[1] && rows == 2 * 5 * 3,
                   std::to_string(rows) + " rows, identical=" + (csv[0] == csv[1] ? "yes" : "no")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
