#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynsymlab/evolve.hpp"
#include "dynsymlab/finder.hpp"
#include "dynsymlab/models.hpp"

namespace dynsymlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DynamicsConfig {
  std::string initial_state = "default";
  TimeGrid grid{0.0, 0.05, 2048};
  std::pair<double, double> window{0.5, 1.0};
  std::vector<std::string> observables;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"json", "csv"};
};

struct ExperimentConfig {
  ModelConfig model;
  FinderOptions finder;
  DynamicsConfig dynamics;
  OutputConfig outputs;
};

/// Strict parse: unknown keys anywhere in the document are fatal.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);

/// Named observable "label@site", e.g. "sigma_x@1", "tau_3@2", "n_up@1".
LatticeOperator parse_observable(const std::string& name,
                                 const LatticeSpec& spec);

nlohmann::json symmetry_report_to_json(const SymmetryReport& report,
                                       const CandidateSpace& space);

// Command bodies; each returns the JSON it wrote (when applicable) and
// writes files under out_dir.
nlohmann::json run_find(const ExperimentConfig& config,
                        const std::filesystem::path& out_dir);
nlohmann::json run_evolve(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir);
nlohmann::json run_theorem1(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);
nlohmann::json run_theorem2(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);
nlohmann::json run_demo(const ExperimentConfig& first,
                        const ExperimentConfig& second,
                        const std::filesystem::path& out_dir);

std::string format_csv_value(double v);

}  // namespace dynsymlab
