#pragma once

// Reproducible experiment pipelines shared by the command-line front end and the acceptance runner.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace engel {

struct Check {
  std::string name;
  bool pass;
  double value;
  double threshold;
  std::string detail;
};

struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  nlohmann::json params = nlohmann::json::object();

  // {"experiment": ..., "seed": ..., "params": {...}}; throws std::invalid_argument when malformed.
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RunReport {
  RunConfig config;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> files;  // file name, contents

  bool passed() const;
  const Check* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();

// Throws std::invalid_argument for unknown experiments, unknown or ill-typed parameters and empty grids.
RunReport run_experiment(const RunConfig& config);

}  // namespace engel
