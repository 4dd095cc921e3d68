#include "mlsc/params_json.hpp"

#include <fstream>

#include "mlsc/error.hpp"
#include "mlsc/rng.hpp"

namespace mlsc {

using nlohmann::json;

ParamsDocument params_from_json(const json& j) {
  try {
    ParamsDocument doc;
    auto& p = doc.params;
    const auto pi = j.at("pi").get<std::vector<double>>();
    p.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), static_cast<Eigen::Index>(pi.size()));
    p.schedule.communities = static_cast<int>(pi.size());
    for (const auto& mat : j.at("schedule")) {
      const auto rows = mat.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd b(static_cast<Eigen::Index>(rows.size()),
                        rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != static_cast<std::size_t>(b.cols())) {
          throw Error(ErrorCode::kDimension, "ragged schedule matrix");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      p.schedule.mats.push_back(std::move(b));
    }
    if (j.contains("psi")) p.psi = j.at("psi").get<std::vector<double>>();
    if (j.contains("n")) {
      p.nodes = j.at("n").get<std::size_t>();
    } else if (p.psi) {
      p.nodes = p.psi->size();
    } else if (j.contains("labels")) {
      p.nodes = j.at("labels").size();
    } else {
      throw Error(ErrorCode::kParameter, "model parameters need \"n\"");
    }
    if (j.contains("psi_uniform")) {
      const auto range = j.at("psi_uniform").get<std::vector<double>>();
      if (range.size() != 2) throw Error(ErrorCode::kParameter, "psi_uniform must be [lo, hi]");
      doc.psi_uniform = std::make_pair(range[0], range[1]);
    }
    doc.psi_normalize = j.value("psi_normalize", false);
    if (j.contains("labels")) {
      Membership m;
      m.communities = p.schedule.communities;
      for (int l : j.at("labels").get<std::vector<int>>()) m.labels.push_back(l - 1);
      m.validate();
      if (m.size() != p.nodes) throw Error(ErrorCode::kDimension, "labels must have n entries");
      doc.labels = std::move(m);
    }
    if (doc.psi_uniform && p.psi) {
      throw Error(ErrorCode::kParameter, "give either psi or psi_uniform, not both");
    }
    p.validate();
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model parameters: ") + e.what());
  }
}

json params_to_json(const ParamsDocument& doc) {
  const auto& p = doc.params;
  json j;
  j["n"] = p.nodes;
  j["pi"] = std::vector<double>(p.pi.data(), p.pi.data() + p.pi.size());
  json sched = json::array();
  for (const auto& b : p.schedule.mats) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(b.cols()));
      for (Eigen::Index c = 0; c < b.cols(); ++c) row[static_cast<std::size_t>(c)] = b(r, c);
      rows.push_back(row);
    }
    sched.push_back(rows);
  }
  j["schedule"] = sched;
  if (p.psi) j["psi"] = *p.psi;
  if (doc.psi_uniform) j["psi_uniform"] = {doc.psi_uniform->first, doc.psi_uniform->second};
  if (doc.psi_normalize) j["psi_normalize"] = true;
  if (doc.labels) {
    std::vector<int> one_based;
    for (int l : doc.labels->labels) one_based.push_back(l + 1);
    j["labels"] = one_based;
  }
  return j;
}

ParamsDocument load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return params_from_json(j);
}

std::pair<ModelParams, Membership> resolve_params(const ParamsDocument& doc, std::uint64_t seed) {
  ModelParams p = doc.params;
  Membership labels = doc.labels ? *doc.labels
                                 : sample_memberships(p.nodes, p.pi, derive_seed(seed, 0x1abe1));
  if (doc.psi_uniform) {
    p.psi = sample_uniform_psi(p.nodes, doc.psi_uniform->first, doc.psi_uniform->second,
                               derive_seed(seed, 0x9517));
  }
  if (doc.psi_normalize && p.psi) p.psi = normalize_psi(labels, *p.psi);
  return {std::move(p), std::move(labels)};
}

}  // namespace mlsc
