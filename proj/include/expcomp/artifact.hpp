#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "expcomp/gof.hpp"
#include "expcomp/simulation.hpp"

namespace expcomp {

/// Record of one command-line run: the arguments, the resolved configuration,
/// the results and when it ran. Replaying `command` with the recorded kernel
/// set reproduces `results` exactly.
struct RunArtifact {
  std::vector<std::string> command;
  nlohmann::json config;
  nlohmann::json results;
  std::string timestamp;
};

nlohmann::json to_json(const RunArtifact& artifact);
RunArtifact artifact_from_json(const nlohmann::json& j);

void write_artifact(const std::filesystem::path& path, const RunArtifact& artifact);
/// ParseError on unreadable or malformed files.
RunArtifact read_artifact(const std::filesystem::path& path);

/// ISO 8601, UTC, second resolution.
std::string utc_timestamp();

nlohmann::json to_json(const EtaGrid& grid);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const GofRow& row);
nlohmann::json to_json(const SimulationReport& report);

}  // namespace expcomp
