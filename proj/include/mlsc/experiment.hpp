#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlsc/genmodel.hpp"
#include "mlsc/metrics.hpp"
#include "mlsc/params_json.hpp"
#include "mlsc/pipeline.hpp"

namespace mlsc {

enum class ExperimentMethod { kAlg1, kAlg2, kAlg3, kBaselineSum, kBaselineSpectralSum };

const char* experiment_method_name(ExperimentMethod m);
ExperimentMethod parse_experiment_method(const std::string& name);

struct ExperimentConfig {
  int scenario = 1;  // 1, 2, 3; 0 selects custom parameters
  ModelVariant variant = ModelVariant::kSbm;
  int form = 1;
  std::optional<ParamsDocument> custom;
  std::string sweep_name = "n";  // "n" or "T"
  std::vector<std::size_t> sweep_values;
  std::size_t fixed_n = 1000;
  std::size_t fixed_t = 11;
  int communities = 4;
  std::vector<ExperimentMethod> methods;
  std::size_t replications = 25;
  double eps = 0.5;
  std::uint64_t base_seed = 0;

  void validate() const;
};

/// Parses a config document. `base_dir` resolves a relative "params_file".
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  double sweep_value = 0.0;
  ExperimentMethod method = ExperimentMethod::kAlg1;
  std::size_t replication = 0;  // 1-based
  std::optional<double> nmi;
  std::optional<double> error;
  std::optional<std::size_t> k_hat;
  std::string status = "ok";
  double seconds = 0.0;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
};

/// Seed of replication r at sweep point s: base ^ mix64(mix64(s) + r).
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t sweep_value, std::uint64_t r);

/// Runs every (sweep value, replication) cell, up to `jobs` at a time. Rows
/// come back ordered by (sweep value, method, replication).
ResultsTable run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct SummaryRow {
  double sweep_value = 0.0;
  ExperimentMethod method = ExperimentMethod::kAlg1;
  std::size_t count = 0;      // successful rows
  std::size_t attrition = 0;  // rows with a non-ok status
  // Empty when no successful row carries the quantity.
  std::optional<double> nmi_mean, nmi_stderr;
  std::optional<double> error_mean, error_stderr;
  std::optional<double> k_hat_mean, k_hat_stderr;
};

std::vector<SummaryRow> summarize(const ResultsTable& table);

/// Columns: sweep_value,method,replication,nmi,error,k_hat,status,seconds
void write_results_csv(std::ostream& out, const ResultsTable& table);
nlohmann::json results_to_json(const ResultsTable& table);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

nlohmann::json diagnostics_to_json(const TheoryDiagnostics& d);
nlohmann::json eval_report_to_json(const EvalReport& r);

}  // namespace mlsc
