#include "mlsc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "mlsc/error.hpp"
#include "mlsc/metrics.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

using nlohmann::json;

const char* experiment_method_name(ExperimentMethod m) {
  switch (m) {
    case ExperimentMethod::kAlg1: return "Alg1";
    case ExperimentMethod::kAlg2: return "Alg2";
    case ExperimentMethod::kAlg3: return "Alg3";
    case ExperimentMethod::kBaselineSum: return "BaselineSum";
    case ExperimentMethod::kBaselineSpectralSum: return "BaselineSpectralSum";
  }
  return "unknown";
}

ExperimentMethod parse_experiment_method(const std::string& name) {
  for (auto m : {ExperimentMethod::kAlg1, ExperimentMethod::kAlg2, ExperimentMethod::kAlg3,
                 ExperimentMethod::kBaselineSum, ExperimentMethod::kBaselineSpectralSum}) {
    if (name == experiment_method_name(m)) return m;
  }
  throw Error(ErrorCode::kParameter, "unknown method \"" + name + "\"");
}

void ExperimentConfig::validate() const {
  if (scenario < 0 || scenario > 3) throw Error(ErrorCode::kParameter, "scenario must be 1, 2, 3 or custom");
  if (scenario == 0 && !custom) throw Error(ErrorCode::kParameter, "custom scenario needs parameters");
  if (sweep_name != "n" && sweep_name != "T") throw Error(ErrorCode::kParameter, "sweep must be over n or T");
  if (sweep_values.empty()) throw Error(ErrorCode::kParameter, "sweep needs at least one value");
  for (std::size_t i = 1; i < sweep_values.size(); ++i) {
    if (sweep_values[i] <= sweep_values[i - 1]) {
      throw Error(ErrorCode::kParameter, "sweep values must be strictly increasing");
    }
  }
  if (methods.empty()) throw Error(ErrorCode::kParameter, "methods must be nonempty");
  if (replications < 1) throw Error(ErrorCode::kParameter, "replications must be at least 1");
  if (!(eps > 0.0)) throw Error(ErrorCode::kParameter, "eps must be positive");
  if (communities < 1) throw Error(ErrorCode::kParameter, "K must be at least 1");
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    ExperimentConfig c;
    const auto& scen = j.at("scenario");
    if (scen.is_string()) {
      if (scen.get<std::string>() != "custom") throw Error(ErrorCode::kParameter, "scenario must be 1, 2, 3 or \"custom\"");
      c.scenario = 0;
    } else {
      c.scenario = scen.get<int>();
      if (c.scenario < 1 || c.scenario > 3) throw Error(ErrorCode::kParameter, "scenario must be 1, 2 or 3");
    }
    const auto variant = j.value("variant", std::string("SBM"));
    if (variant == "SBM") {
      c.variant = ModelVariant::kSbm;
    } else if (variant == "DCBM") {
      c.variant = ModelVariant::kDcbm;
    } else {
      throw Error(ErrorCode::kParameter, "variant must be SBM or DCBM");
    }
    c.form = j.value("form", 1);
    if (c.scenario == 0) {
      if (j.contains("params")) {
        c.custom = params_from_json(j.at("params"));
      } else if (j.contains("params_file")) {
        std::filesystem::path p = j.at("params_file").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        c.custom = load_params(p);
      } else {
        throw Error(ErrorCode::kParameter, "custom scenario needs \"params\" or \"params_file\"");
      }
      c.communities = c.custom->params.communities();
      c.fixed_n = c.custom->params.nodes;
      c.fixed_t = c.custom->params.schedule.layer_count();
    }
    const auto& sweep = j.at("sweep");
    c.sweep_name = sweep.at("name").get<std::string>();
    c.sweep_values = sweep.at("values").get<std::vector<std::size_t>>();
    if (j.contains("fixed")) {
      const auto& f = j.at("fixed");
      c.fixed_n = f.value("n", c.fixed_n);
      c.fixed_t = f.value("T", c.fixed_t);
    }
    c.communities = j.value("K", c.communities);
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(parse_experiment_method(m.get<std::string>()));
    c.replications = j.value("replications", std::size_t{25});
    c.eps = j.value("eps", 0.5);
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t sweep_value, std::uint64_t r) {
  return base ^ mix64(mix64(sweep_value) + r);
}

namespace {

struct Instance {
  ModelParams params;
  Membership labels;
};

Instance make_instance(const ExperimentConfig& c, std::size_t n, std::size_t t, std::uint64_t seed) {
  if (c.scenario == 0) {
    ParamsDocument doc = *c.custom;
    auto& p = doc.params;
    if (c.sweep_name == "n" && n != p.nodes) {
      if (p.psi || doc.labels) {
        throw Error(ErrorCode::kParameter, "cannot sweep n with fixed psi or labels");
      }
      p.nodes = n;
    }
    if (t != p.schedule.layer_count()) {
      // A single matrix stands for every layer.
      if (p.schedule.layer_count() == 1) {
        p.schedule.mats.assign(t, p.schedule.mats.front());
      } else if (t > p.schedule.layer_count()) {
        throw Error(ErrorCode::kParameter, "custom schedule has fewer than T matrices");
      } else {
        p.schedule.mats.resize(t);
      }
    }
    auto [params, labels] = resolve_params(doc, seed);
    return {std::move(params), std::move(labels)};
  }
  Instance inst;
  inst.params = scenario_params(c.scenario, c.variant, n, t, derive_seed(seed, 1), c.form);
  inst.labels = sample_memberships(n, inst.params.pi, derive_seed(seed, 2));
  return inst;
}

// All rows of one (sweep value, replication) cell, in method order.
std::vector<ResultRow> run_cell(const ExperimentConfig& c, std::size_t sweep_value, std::size_t rep) {
  using clock = std::chrono::steady_clock;
  const std::uint64_t seed = replication_seed(c.base_seed, sweep_value, rep);
  const std::size_t n = c.sweep_name == "n" ? sweep_value : c.fixed_n;
  const std::size_t t = c.sweep_name == "T" ? sweep_value : c.fixed_t;

  std::vector<ResultRow> rows;
  for (auto m : c.methods) {
    ResultRow row;
    row.sweep_value = static_cast<double>(sweep_value);
    row.method = m;
    row.replication = rep;
    rows.push_back(row);
  }

  Instance inst;
  MultiRelationalNetwork net;
  try {
    inst = make_instance(c, n, t, seed);
    net = sample_network(inst.params, inst.labels, derive_seed(seed, 3));
  } catch (const Error& e) {
    for (auto& row : rows) row.status = to_string(e.code());
    return rows;
  }

  DetectionOptions opts;
  opts.eps = c.eps;
  opts.seed = derive_seed(seed, 4);
  for (auto& row : rows) {
    const auto start = clock::now();
    try {
      if (row.method == ExperimentMethod::kAlg3) {
        row.k_hat = algorithm3(net, opts).k_hat;
      } else {
        DetectionResult res;
        switch (row.method) {
          case ExperimentMethod::kAlg1: res = algorithm1(net, c.communities, opts); break;
          case ExperimentMethod::kAlg2: res = algorithm2(net, c.communities, opts); break;
          case ExperimentMethod::kBaselineSum: res = baseline_sum_spectral(net, c.communities, opts); break;
          default: res = baseline_spectral_sum(net, c.communities, opts); break;
        }
        const auto report = misclassification(inst.labels, res.membership);
        row.nmi = report.nmi;
        row.error = report.overall_error;
      }
    } catch (const Error& e) {
      row.status = to_string(e.code());
    }
    row.seconds = std::chrono::duration<double>(clock::now() - start).count();
  }
  return rows;
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& config, unsigned jobs) {
  config.validate();
  const std::size_t sweeps = config.sweep_values.size();
  const std::size_t reps = config.replications;
  std::vector<std::vector<ResultRow>> cells(sweeps * reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task; (task = next.fetch_add(1)) < cells.size();) {
      const std::size_t s = task / reps;
      const std::size_t r = task % reps;
      cells[task] = run_cell(config, config.sweep_values[s], r + 1);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ResultsTable table;
  table.rows.reserve(cells.size() * config.methods.size());
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      for (std::size_t r = 0; r < reps; ++r) table.rows.push_back(cells[s * reps + r][m]);
    }
  }
  return table;
}

namespace {

struct Accumulator {
  std::vector<double> values;

  void add(double v) { values.push_back(v); }
  std::optional<double> mean() const {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  std::optional<double> stderr_() const {
    if (values.empty()) return std::nullopt;
    if (values.size() < 2) return 0.0;
    const double m = *mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double c = static_cast<double>(values.size());
    return std::sqrt(ss / (c - 1.0) / c);
  }
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<SummaryRow> summarize(const ResultsTable& table) {
  struct Group {
    Accumulator nmi, error, k_hat;
    std::size_t ok = 0, failed = 0;
  };
  std::vector<std::pair<std::pair<double, ExperimentMethod>, Group>> groups;
  for (const auto& row : table.rows) {
    const auto key = std::make_pair(row.sweep_value, row.method);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.emplace_back(key, Group{});
      it = groups.end() - 1;
    }
    auto& g = it->second;
    if (row.status != "ok") {
      ++g.failed;
      continue;
    }
    ++g.ok;
    if (row.nmi) g.nmi.add(*row.nmi);
    if (row.error) g.error.add(*row.error);
    if (row.k_hat) g.k_hat.add(static_cast<double>(*row.k_hat));
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, g] : groups) {
    SummaryRow s;
    s.sweep_value = key.first;
    s.method = key.second;
    s.count = g.ok;
    s.attrition = g.failed;
    s.nmi_mean = g.nmi.mean();
    s.nmi_stderr = g.nmi.stderr_();
    s.error_mean = g.error.mean();
    s.error_stderr = g.error.stderr_();
    s.k_hat_mean = g.k_hat.mean();
    s.k_hat_stderr = g.k_hat.stderr_();
    out.push_back(s);
  }
  return out;
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << "sweep_value,method,replication,nmi,error,k_hat,status,seconds\n";
  for (const auto& r : table.rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", r.seconds);
    out << format_number(r.sweep_value) << ',' << experiment_method_name(r.method) << ','
        << r.replication << ',' << (r.nmi ? format_number(*r.nmi) : "") << ','
        << (r.error ? format_number(*r.error) : "") << ','
        << (r.k_hat ? std::to_string(*r.k_hat) : "") << ',' << r.status << ',' << secs << '\n';
  }
}

json results_to_json(const ResultsTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json j;
    j["sweep_value"] = r.sweep_value;
    j["method"] = experiment_method_name(r.method);
    j["replication"] = r.replication;
    j["nmi"] = r.nmi ? json(*r.nmi) : json(nullptr);
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    j["k_hat"] = r.k_hat ? json(*r.k_hat) : json(nullptr);
    j["status"] = r.status;
    j["seconds"] = r.seconds;
    rows.push_back(j);
  }
  return json{{"rows", rows}, {"summary", [&] {
                                 json s = json::array();
                                 for (const auto& row : summarize(table)) {
                                   s.push_back({{"sweep_value", row.sweep_value},
                                                {"method", experiment_method_name(row.method)},
                                                {"count", row.count},
                                                {"attrition", row.attrition},
                                                {"nmi_mean", optional_json(row.nmi_mean)},
                                                {"nmi_stderr", optional_json(row.nmi_stderr)},
                                                {"error_mean", optional_json(row.error_mean)},
                                                {"error_stderr", optional_json(row.error_stderr)},
                                                {"k_hat_mean", optional_json(row.k_hat_mean)},
                                                {"k_hat_stderr", optional_json(row.k_hat_stderr)}});
                                 }
                                 return s;
                               }()}};
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "sweep_value,method,count,attrition,nmi_mean,nmi_stderr,error_mean,error_stderr,k_hat_mean,k_hat_stderr\n";
  for (const auto& s : summary) {
    out << format_number(s.sweep_value) << ',' << experiment_method_name(s.method) << ',' << s.count
        << ',' << s.attrition << ',' << format_optional(s.nmi_mean) << ','
        << format_optional(s.nmi_stderr) << ',' << format_optional(s.error_mean) << ','
        << format_optional(s.error_stderr) << ',' << format_optional(s.k_hat_mean) << ','
        << format_optional(s.k_hat_stderr) << '\n';
  }
}

json diagnostics_to_json(const TheoryDiagnostics& d) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j{{"d", d.d},
         {"lambda", d.lambda},
         {"signal", d.signal},
         {"n_min", d.n_min},
         {"n_max", d.n_max},
         {"bound", num(d.bound)},
         {"probability", d.probability},
         {"condition_ok", d.condition_ok}};
  if (d.dcbm) {
    j["dcbm"] = {{"weighted_sizes", d.dcbm->weighted_sizes},
                 {"heterogeneity", d.dcbm->heterogeneity},
                 {"psi_min", d.dcbm->psi_min},
                 {"weighted_min", d.dcbm->weighted_min},
                 {"weighted_max", d.dcbm->weighted_max},
                 {"count_bound", num(d.dcbm->count_bound)},
                 {"probability", d.dcbm->probability}};
  }
  return j;
}

json eval_report_to_json(const EvalReport& r) {
  std::vector<int> perm_one_based;
  for (int p : r.permutation) perm_one_based.push_back(p + 1);
  std::vector<std::vector<int>> confusion;
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row;
    for (Eigen::Index c = 0; c < r.confusion.cols(); ++c) row.push_back(r.confusion(i, c));
    confusion.push_back(row);
  }
  return json{{"nmi", r.nmi},
              {"overall_error", r.overall_error},
              {"per_community", r.per_community},
              {"permutation", perm_one_based},
              {"confusion", confusion}};
}

}  // namespace mlsc
