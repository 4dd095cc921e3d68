#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mlsc/genmodel.hpp"

namespace mlsc {

/// On-disk model description. Besides the plain ModelParams fields it may
/// carry fixed labels and a recipe for random degree parameters.
///
///   {
///     "n": 1000,
///     "pi": [0.5, 0.5],
///     "schedule": [ [[0.01, 0.002], [0.002, 0.01]], ... ],   // T matrices, K x K
///     "psi": [ ... ],              // optional, n positive values
///     "psi_uniform": [0.5, 1.0],   // optional, draw psi_i ~ U(lo, hi) per seed
///     "psi_normalize": false,      // optional, divide psi by its community maximum
///     "labels": [1, 2, ...]        // optional, 1-based community labels
///   }
struct ParamsDocument {
  ModelParams params;
  std::optional<std::pair<double, double>> psi_uniform;
  bool psi_normalize = false;
  std::optional<Membership> labels;
};

ParamsDocument params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ParamsDocument& doc);
ParamsDocument load_params(const std::filesystem::path& path);

/// Materializes labels and psi for one seed: fixed labels are used as given,
/// otherwise drawn from pi; psi_uniform draws are taken after the labels.
std::pair<ModelParams, Membership> resolve_params(const ParamsDocument& doc, std::uint64_t seed);

}  // namespace mlsc
