#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace homotopy {

struct ExperimentOutput {
  nlohmann::json resolved_config;  // input config with defaults filled in
  nlohmann::json scores;           // deterministic payload
  std::map<std::string, std::string> sidecars;  // file name -> CSV text
  std::vector<std::string> input_files;
};

std::vector<std::string> experiment_names();

/// Runs rank_grid, intrinsic_extrinsic or hausdorff_study. ValidationError on an unknown name or a
/// malformed config.
///
/// Config keys shared by all experiments:
///   "family": {"base": SynthSpec, "sigmas": [...]} or {"files": [...]}
///   "seed":   default seed for the synthetic base and classifier sampling
ExperimentOutput run_experiment(std::string_view name, const nlohmann::json& config);

}  // namespace homotopy
