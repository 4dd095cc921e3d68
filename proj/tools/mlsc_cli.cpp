// Command-line front end: generate, detect, select-k, eval, experiment, diagnose.

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mlsc/error.hpp"
#include "mlsc/experiment.hpp"
#include "mlsc/genmodel.hpp"
#include "mlsc/metrics.hpp"
#include "mlsc/netcore.hpp"
#include "mlsc/params_json.hpp"
#include "mlsc/pipeline.hpp"
#include "mlsc/rng.hpp"

namespace {

using namespace mlsc;

// Sizes come from the flags, else from a "# n=.. T=.." header, else from the
// largest indices present.
MultiRelationalNetwork read_network(const std::string& path, std::optional<std::size_t> n,
                                    std::optional<std::size_t> layers) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  if (!n || !layers) {
    static const std::regex header(R"(#\s*n=(\d+)\s+T=(\d+))");
    std::smatch m;
    if (std::regex_search(text, m, header)) {
      if (!n) n = std::stoull(m[1]);
      if (!layers) layers = std::stoull(m[2]);
    }
  }
  if (!n || !layers) {
    std::istringstream scan(text);
    std::string line;
    long long max_t = 0, max_i = -1;
    while (std::getline(scan, line)) {
      line = line.substr(0, line.find('#'));
      std::istringstream f(line);
      long long t, i, j;
      if (f >> t >> i >> j) {
        max_t = std::max(max_t, t);
        max_i = std::max({max_i, i, j});
      }
    }
    if (!n) n = static_cast<std::size_t>(max_i + 1);
    if (!layers) layers = static_cast<std::size_t>(std::max<long long>(max_t, 1));
  }
  std::istringstream records(text);
  return read_multilayer(records, *n, *layers);
}

Membership read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  Membership m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream f(line);
    int label;
    if (!(f >> label)) {
      if (f.eof()) continue;
      throw ParseError(lineno, "expected an integer label");
    }
    if (label < 1) throw ParseError(lineno, "labels are 1-based");
    m.labels.push_back(label - 1);
    m.communities = std::max(m.communities, label);
  }
  return m;
}

void write_labels(std::ostream& out, const Membership& m) {
  for (int l : m.labels) out << (l + 1) << '\n';
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  fn(out);
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::kAlg1, Method::kAlg2, Method::kBaselineSum, Method::kBaselineSpectralSum}) {
    if (name == method_name(m)) return m;
  }
  throw Error(ErrorCode::kParameter, "unknown method \"" + name + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection for multilayer networks via sums of squared adjacency matrices"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double eps = 0.5;
  unsigned jobs = 1;
  std::string output;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
    sub->add_option("--output,-o", output, "Output path (default: standard output)");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a multilayer network from model parameters");
  std::string params_path, labels_out;
  gen->add_option("--params", params_path, "ModelParams JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--labels-out", labels_out, "Write the sampled community labels here");
  add_common(gen);

  // detect
  auto* det = app.add_subcommand("detect", "Estimate community labels from an edge list");
  std::string input, method = "Alg1";
  int k = 0;
  std::optional<std::size_t> nodes, layers;
  det->add_option("--input,-i", input, "Edge list (t i j per line)")->required()->check(CLI::ExistingFile);
  det->add_option("--K", k, "Number of communities")->required();
  det->add_option("--method", method, "Alg1, Alg2, BaselineSum or BaselineSpectralSum")->capture_default_str();
  det->add_option("--nodes", nodes, "Node count (default: header or largest index + 1)");
  det->add_option("--layers", layers, "Layer count (default: header or largest layer)");
  det->add_option("--eps", eps, "K-means approximation parameter")->capture_default_str();
  add_common(det);

  // select-k
  auto* sel = app.add_subcommand("select-k", "Estimate the number of communities");
  sel->add_option("--input,-i", input, "Edge list")->required()->check(CLI::ExistingFile);
  sel->add_option("--nodes", nodes, "Node count");
  sel->add_option("--layers", layers, "Layer count");
  add_common(sel);

  // eval
  auto* ev = app.add_subcommand("eval", "Compare estimated labels against the truth");
  std::string truth_path, est_path;
  ev->add_option("--truth", truth_path, "True labels, one per line")->required()->check(CLI::ExistingFile);
  ev->add_option("--estimate", est_path, "Estimated labels, one per line")->required()->check(CLI::ExistingFile);
  ev->add_option("--output,-o", output, "Output path");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a simulation sweep and write a results CSV");
  std::string config_path, json_out, summary_out;
  exp->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--jobs", jobs, "Parallel replications")->capture_default_str();
  exp->add_option("--json", json_out, "Also write rows and summary as JSON");
  exp->add_option("--summary", summary_out, "Also write the per-(sweep, method) summary CSV");
  exp->add_option("--output,-o", output, "Results CSV path");

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "Evaluate theory diagnostics for model parameters");
  DiagnosticConstants constants;
  dia->add_option("--params", params_path, "ModelParams JSON")->required()->check(CLI::ExistingFile);
  dia->add_option("--C", constants.c, "Constant C")->capture_default_str();
  dia->add_option("--C-prime", constants.c_prime, "Constant C'")->capture_default_str();
  dia->add_option("--Delta", constants.delta, "Constant Delta (> 8)")->capture_default_str();
  bool raw_psi = false;
  dia->add_flag("--raw-psi", raw_psi, "Use psi as given instead of dividing by community maxima");
  add_common(dia);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto doc = load_params(params_path);
      const auto [params, labels] = resolve_params(doc, seed);
      const auto net = sample_network(params, labels, derive_seed(seed, 3));
      with_output(output, [&](std::ostream& out) { write_edge_list(out, net); });
      if (!labels_out.empty()) with_output(labels_out, [&](std::ostream& out) { write_labels(out, labels); });
    } else if (det->parsed()) {
      const auto net = read_network(input, nodes, layers);
      DetectionOptions opts;
      opts.eps = eps;
      opts.seed = seed;
      DetectionResult res;
      switch (parse_method(method)) {
        case Method::kAlg1: res = algorithm1(net, k, opts); break;
        case Method::kAlg2: res = algorithm2(net, k, opts); break;
        case Method::kBaselineSum: res = baseline_sum_spectral(net, k, opts); break;
        case Method::kBaselineSpectralSum: res = baseline_spectral_sum(net, k, opts); break;
      }
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      with_output(output, [&](std::ostream& out) { write_labels(out, res.membership); });
    } else if (sel->parsed()) {
      const auto net = read_network(input, nodes, layers);
      DetectionOptions opts;
      opts.seed = seed;
      const auto est = algorithm3(net, opts);
      with_output(output, [&](std::ostream& out) { out << est.k_hat << '\n'; });
    } else if (ev->parsed()) {
      auto truth = read_labels(truth_path);
      auto est = read_labels(est_path);
      const int size = std::max(truth.communities, est.communities);
      truth.communities = est.communities = size;
      const auto report = misclassification(truth, est);
      with_output(output, [&](std::ostream& out) { out << eval_report_to_json(report).dump(2) << '\n'; });
    } else if (exp->parsed()) {
      const auto config = load_experiment_config(config_path);
      const auto table = run_experiment(config, jobs);
      with_output(output, [&](std::ostream& out) { write_results_csv(out, table); });
      if (!json_out.empty()) {
        with_output(json_out, [&](std::ostream& out) { out << results_to_json(table).dump(2) << '\n'; });
      }
      if (!summary_out.empty()) {
        with_output(summary_out, [&](std::ostream& out) { write_summary_csv(out, summarize(table)); });
      }
    } else if (dia->parsed()) {
      auto doc = load_params(params_path);
      if (!raw_psi) doc.psi_normalize = true;
      const auto [params, labels] = resolve_params(doc, seed);
      const auto diag = theory_diagnostics(params, labels, constants);
      with_output(output, [&](std::ostream& out) { out << diagnostics_to_json(diag).dump(2) << '\n'; });
    }
  } catch (const mlsc::Error& e) {
    std::cerr << "error (" << mlsc::to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  }
  return 0;
}
