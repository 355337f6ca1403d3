// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration in sectioned INI form. Sections: [scenario],
// [radio], [semantic], [compute], [agent], [baseline], [experiment]; the key
// names are listed in README.md and match the struct fields below.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "risvec/baselines.hpp"
#include "risvec/environment.hpp"
#include "risvec/ppo.hpp"

namespace risvec {

enum class SweepAxis { None, Power, Vehicles, RisElements };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& s);

struct BaselineConfig {
  std::size_t budget = 2000;  // fitness evaluations per slot
  GaConfig ga;
  QpsoConfig qpso;
};

struct ExperimentSettings {
  SweepAxis sweep = SweepAxis::None;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> methods{"ppo", "ga", "qpso"};
  std::string output = "runs/default";
};

struct ExperimentConfig {
  SystemConfig system;
  std::string semantic_table;  // CSV path; empty selects the synthetic table
  AgentConfig agent;
  BaselineConfig baseline;
  ExperimentSettings experiment;

  // Throws ConfigError naming the offending field path.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

// Canonical INI text with every key written out, defaults included.
std::string to_ini(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical INI, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Config of one sweep cell with the swept parameter applied.
SystemConfig apply_sweep(const SystemConfig& base, SweepAxis axis, double value);

}  // namespace risvec
