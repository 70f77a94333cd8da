#include "expcomp/artifact.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "expcomp/errors.hpp"

namespace expcomp {

using nlohmann::json;

json to_json(const RunArtifact& artifact) {
  return json{{"command", artifact.command},
              {"config", artifact.config},
              {"results", artifact.results},
              {"timestamp", artifact.timestamp}};
}

RunArtifact artifact_from_json(const json& j) {
  try {
    RunArtifact a;
    a.command = j.at("command").get<std::vector<std::string>>();
    a.config = j.at("config");
    a.results = j.at("results");
    a.timestamp = j.value("timestamp", "");
    return a;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run artifact: ") + e.what(), 0);
  }
}

void write_artifact(const std::filesystem::path& path, const RunArtifact& artifact) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string(), 0);
  out << to_json(artifact).dump(2) << '\n';
}

RunArtifact read_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run artifact: ") + e.what(), 0);
  }
  return artifact_from_json(j);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const EtaGrid& grid) {
  return json{{"eta_min", grid.lower},
              {"eta_max", grid.upper},
              {"eta_step", grid.coarse_step},
              {"refine", grid.refinement_rounds}};
}

json to_json(const FitResult& fit) {
  return json{{"model", model_key(fit.model)}, {"theta", fit.theta}, {"eta", fit.eta},
              {"m", fit.m},                    {"nll", fit.nll},     {"n", fit.n},
              {"p", fit.p}};
}

json to_json(const GofRow& row) {
  json j{{"label", row.label}, {"p", row.p},       {"n", row.n},       {"nll", row.nll},
         {"aic", row.aic},     {"bic", row.bic},   {"aicc", row.aicc}, {"caic", row.caic},
         {"literature", row.literature}};
  j["model"] = row.model ? json(model_key(*row.model)) : json(nullptr);
  return j;
}

json to_json(const SimulationReport& r) {
  return json{{"model", model_key(r.scenario.model)},
              {"eta", r.scenario.eta},
              {"theta", r.scenario.theta},
              {"n", r.scenario.n},
              {"replicates", r.scenario.replicates},
              {"base_seed", r.scenario.base_seed},
              {"eta_mean", r.eta_mean},
              {"theta_mean", r.theta_mean},
              {"eta_sd", r.eta_sd},
              {"theta_sd", r.theta_sd},
              {"failures", r.failures}};
}

}  // namespace expcomp
