// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration and result files.
//
// Output directory layout:
//   config.ini              resolved configuration (re-runnable as --config)
//   manifest.json           version, config hash, seeds, files, failures
//   metrics_<method>.csv    one row per evaluated slot
//   boxplot.csv             mean delay per (method, sweep value, seed, round)
//   summary.csv             plot-data aggregation (see write_summary)
//   reward_curve_<run>.csv  per trained cell, `episode,mean_reward`

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "risvec/config.hpp"
#include "risvec/ppo.hpp"

namespace risvec {

inline constexpr const char* kMetricsSchema = "# schema: metrics v1";
inline constexpr const char* kMetricsHeader =
    "run_id,seed,sweep_value,method,slot,total_delay,v2i_delay,v2v_delay,violations,reward";
inline constexpr const char* kRewardSchema = "# schema: reward_curve v1";
inline constexpr const char* kRewardHeader = "episode,mean_reward";
inline constexpr const char* kBoxplotSchema = "# schema: boxplot v1";
inline constexpr const char* kBoxplotHeader = "method,sweep_value,seed,episode,mean_delay";
inline constexpr const char* kSummarySchema = "# schema: summary v1";
inline constexpr const char* kSummaryHeader =
    "method,sweep_value,seeds,mean_total_delay,std_total_delay,mean_v2i_delay,mean_v2v_delay,"
    "mean_violations";

struct MetricsRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  double sweep_value = 0.0;
  std::string method;
  std::size_t slot = 0;  // round * slots_per_round + slot within the round
  double total_delay = 0.0;
  double v2i_delay = 0.0;
  double v2v_delay = 0.0;
  std::size_t violations = 0;
  double reward = 0.0;
};

// Fixed-precision formatting shared by every CSV writer.
std::string format_real(double v);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& rows);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);
void write_reward_curve(const std::filesystem::path& path, const std::vector<double>& rewards);

std::shared_ptr<const SemanticTable> load_semantic_table(const ExperimentConfig& cfg);

std::string run_id(SweepAxis axis, double value, std::uint64_t seed);

struct CellResult {
  std::vector<MetricsRecord> records;
  std::vector<double> round_mean_delay;  // one per test round
  std::vector<double> reward_curve;      // ppo only
  std::size_t evaluations_per_slot = 0;
  bool aborted = false;
};

// Evaluates a fixed policy for agent.test_rounds rounds of agent.test_slots
// slots. `budget` = 1 is the plain deterministic test.
CellResult evaluate_trained(Environment& env, const PolicyParams& params, const ExperimentConfig& cfg,
                            std::uint64_t seed, std::size_t budget, const std::string& id,
                            double sweep_value);

// One (sweep value, seed, method) cell. Methods: ppo (train then evaluate),
// ga, qpso, cophase.
CellResult run_cell(const ExperimentConfig& cfg, std::shared_ptr<const SemanticTable> table,
                    double sweep_value, std::uint64_t seed, const std::string& method);

struct CellFailure {
  std::string run_id;
  std::string method;
  std::string error;
};

struct ExperimentReport {
  std::size_t cells = 0;
  std::vector<CellFailure> failures;
  std::vector<std::filesystem::path> files;
};

// Runs every cell, writes all result files into `out`. A throwing cell is
// recorded as a failure and the remaining cells still run. With more than one
// of ppo/ga/qpso selected, every method must spend baseline.budget
// evaluations per slot; a mismatch fails the cell.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                std::ostream* log = nullptr);

// Writes config.ini and manifest.json into `out`.
void write_manifest(const std::filesystem::path& out, const ExperimentConfig& cfg,
                    const std::string& command, const ExperimentReport& report);

// Aggregates every metrics_*.csv in `dir`: per (method, sweep value) the mean
// over seeds of each seed's mean slot delay. Writes summary.csv.
std::filesystem::path write_summary(const std::filesystem::path& dir);

}  // namespace risvec
