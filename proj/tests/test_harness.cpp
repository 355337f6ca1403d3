// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "risvec/cli.hpp"
#include "risvec/config.hpp"
#include "risvec/harness.hpp"

using namespace risvec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("risvec_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kTiny = R"(
[scenario]
vehicles = 2
service_vehicles = 1
resource_blocks = 2

[radio]
ris_elements = 4

[agent]
hidden = 6
episodes = 3
steps_per_episode = 5
update_interval = 10
epochs = 1
minibatch = 4
test_rounds = 2
test_slots = 4

[baseline]
budget = 20
population = 10

[experiment]
sweep = power
values = 0.1, 0.3
seeds = 1, 2
methods = ppo, ga, qpso, cophase
)";

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "risvec");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig d = parse_config("");
  CHECK(d.system.radio.rician_factor == 3.0);
  CHECK(d.system.scenario.vehicles == 15);
  CHECK(d.baseline.budget == 2000);
  CHECK(d.baseline.ga.population == 50);
  CHECK(d.experiment.seeds == std::vector<std::uint64_t>{1});

  const ExperimentConfig t = parse_config(kTiny);
  const ExperimentConfig again = parse_config(to_ini(t));
  CHECK(to_ini(again) == to_ini(t));
  CHECK(config_hash(again) == config_hash(t));
  CHECK(config_hash(t) != config_hash(d));
  CHECK(to_ini(t).find("rician_factor = 3\n") != std::string::npos);
}

TEST_CASE("config errors name the problem") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config(text, "test.cfg");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("[radio]\ntx_power = -0.2\n").find("radio.tx_power") != std::string::npos);
  CHECK(message("[radio]\ntx_pwr = 0.2\n").find("radio.tx_pwr") != std::string::npos);
  CHECK(message("[radio]\ntx_power = abc\n").find("radio.tx_power") != std::string::npos);
  CHECK(message("[bogus]\nx = 1\n").find("bogus") != std::string::npos);
  CHECK(message("[radio]\n\ntx_power 0.2\n").find("test.cfg:3") != std::string::npos);
  CHECK(message("[experiment]\nseeds =\n").find("experiment.seeds") != std::string::npos);
  CHECK(message("[experiment]\nmethods = ppo, sa\n").find("experiment.methods") != std::string::npos);
  CHECK(message("[experiment]\nsweep = power\n").find("experiment.values") != std::string::npos);
  CHECK(message("[experiment]\nsweep = vehicles\nvalues = 2.5\n").find("experiment.values") !=
        std::string::npos);
  CHECK(message("[semantic]\nsimilarity_threshold = 1.5\n").find("semantic.similarity_threshold") !=
        std::string::npos);
}

TEST_CASE("Table-1 preset") {
  const auto c = load_config(fs::path(RISVEC_SOURCE_DIR) / "configs/table1.cfg");
  const auto& s = c.system;
  CHECK(s.radio.path_exp_ris_edge == 2.2);
  CHECK(s.radio.path_exp_user_ris == 2.2);
  CHECK(s.radio.path_exp_direct == 3.5);
  CHECK(s.radio.ris_elements == 36);
  CHECK(s.radio.tx_power == 0.2);
  CHECK(s.radio.noise_power == 1.44e-10);
  CHECK(s.radio.bandwidth == 360e3);
  CHECK(s.scenario.vehicles == 15);
  CHECK(s.scenario.speed == 20.0);
  CHECK(s.scenario.task_unit_bits == 4e5);
  CHECK(s.scenario.rsu_pos.x == -10.0);
  CHECK(s.scenario.ris_pos.y == 175.0);
  CHECK(s.compute.cycles_per_bit == 1000.0);
  CHECK(s.compute.local_freq == 2e9);
  CHECK(s.compute.rsu_freq == 6e9);
  CHECK(s.compute.sv_freq == 2e9);
  CHECK(s.semantic.units_per_sentence == 100.0);
  CHECK(s.semantic.words_per_sentence == 20.0);
  CHECK(s.semantic.bits_per_sentence == 1200.0);
  CHECK(s.semantic.similarity_threshold == 0.9);
  CHECK(c.agent.actor_lr == 3e-4);
  CHECK(c.agent.critic_lr == 1e-3);
  CHECK(c.agent.clip == 0.2);
  CHECK(c.agent.discount == 0.6);
  CHECK(c.agent.episodes == 5000);
  CHECK(s.radio.rician_factor == 3.0);

  for (const char* name : {"small.cfg", "power_sweep.cfg", "vehicles_sweep.cfg", "ris_sweep.cfg"})
    CHECK_NOTHROW(load_config(fs::path(RISVEC_SOURCE_DIR) / "configs" / name));
}

TEST_CASE("sweep apply") {
  SystemConfig s;
  CHECK(apply_sweep(s, SweepAxis::Power, 0.25).radio.tx_power == 0.25);
  CHECK(apply_sweep(s, SweepAxis::Vehicles, 20).scenario.vehicles == 20);
  CHECK(apply_sweep(s, SweepAxis::RisElements, 64).radio.ris_elements == 64);
  CHECK(apply_sweep(s, SweepAxis::None, 9).radio.tx_power == 0.2);
}

TEST_CASE("experiment run writes complete, reproducible outputs") {
  const ExperimentConfig cfg = parse_config(kTiny);
  const fs::path a = scratch("exp_a"), b = scratch("exp_b");
  const auto ra = run_experiment(cfg, a);
  const auto rb = run_experiment(cfg, b);
  CHECK(ra.cells == 2 * 2 * 4);
  CHECK(ra.failures.empty());

  for (const char* f : {"metrics_ppo.csv", "metrics_ga.csv", "metrics_qpso.csv", "metrics_cophase.csv",
                        "boxplot.csv", "summary.csv", "config.ini", "manifest.json",
                        "reward_curve_power-0.1-s1.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }

  const auto rows = read_metrics_csv(a / "metrics_ga.csv");
  CHECK(rows.size() == 2 * 2 * 2 * 4);
  for (const auto& r : rows) {
    CHECK(r.method == "ga");
    CHECK(r.total_delay >= 0.0);
    CHECK(r.v2i_delay >= 0.0);
    CHECK(r.v2v_delay >= 0.0);
    CHECK(r.reward == doctest::Approx(-r.total_delay));
  }
  const std::string metrics = slurp(a / "metrics_ppo.csv");
  CHECK(metrics.rfind(std::string(kMetricsSchema) + "\n" + kMetricsHeader + "\n", 0) == 0);
  CHECK(slurp(a / "reward_curve_power-0.3-s2.csv").find("episode,mean_reward\n") != std::string::npos);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["config_hash"] == config_hash(cfg));
  CHECK(manifest["seeds"] == std::vector<int>{1, 2});
  CHECK(manifest["code_version"] == RISVEC_VERSION);
  CHECK(manifest["failures"].empty());
  CHECK(manifest.contains("normalization"));

  // Re-running from the recorded config reproduces the metrics exactly.
  const fs::path c = scratch("exp_c");
  run_experiment(load_config(a / "config.ini"), c);
  CHECK(slurp(c / "metrics_qpso.csv") == slurp(a / "metrics_qpso.csv"));

  // summary: one row per (method, sweep value)
  std::istringstream summary(slurp(a / "summary.csv"));
  std::string line;
  int data_rows = 0;
  while (std::getline(summary, line))
    if (!line.empty() && line[0] != '#' && line.rfind("method,", 0) != 0) ++data_rows;
  CHECK(data_rows == 4 * 2);

  // boxplot: per (method, value, seed, round)
  std::istringstream box(slurp(a / "boxplot.csv"));
  int box_rows = -2;
  while (std::getline(box, line)) ++box_rows;
  CHECK(box_rows == 4 * 2 * 2 * 2);
}

TEST_CASE("command line") {
  std::string err;
  CHECK(cli({"train", "--bogus-flag"}, &err) == 1);
  CHECK(err.find("Usage") != std::string::npos);
  CHECK(cli({}) == 1);
  CHECK(cli({"fly"}) == 1);
  CHECK(cli({"eval"}) == 1);
  CHECK(cli({"train", "--seed", "x"}) == 1);
  CHECK(cli({"--help"}) == 0);

  const fs::path dir = scratch("cli");
  const fs::path cfg_path = dir / "tiny.cfg";
  std::ofstream(cfg_path) << kTiny;
  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "[radio]\ntx_power = -1\n";
  CHECK(cli({"sweep", "--config", bad.string()}, &err) == 2);
  CHECK(err.find("radio.tx_power") != std::string::npos);

  const fs::path run = dir / "run";
  REQUIRE(cli({"train", "--config", cfg_path.string(), "--out", run.string(), "--seed", "4"}) == 0);
  CHECK(fs::exists(run / "checkpoint.json"));
  CHECK(fs::exists(run / "reward_curve.csv"));
  CHECK(fs::exists(run / "manifest.json"));

  const fs::path ev = dir / "eval";
  REQUIRE(cli({"eval", "--config", cfg_path.string(), "--checkpoint", (run / "checkpoint.json").string(),
               "--out", ev.string()}) == 0);
  const auto rows = read_metrics_csv(ev / "metrics_ppo.csv");
  CHECK(rows.size() == 2 * 4);

  const fs::path bl = dir / "baseline";
  REQUIRE(cli({"baseline", "--config", cfg_path.string(), "--out", bl.string()}) == 0);
  CHECK(fs::exists(bl / "metrics_ga.csv"));
  CHECK(fs::exists(bl / "metrics_qpso.csv"));

  CHECK(cli({"plot-data", "--out", ev.string()}) == 0);
  CHECK(fs::exists(ev / "summary.csv"));
  CHECK(cli({"plot-data", "--out", (dir / "missing").string()}) == 2);
  CHECK(cli({"eval", "--config", cfg_path.string(), "--checkpoint", (dir / "none.json").string(),
             "--out", ev.string()}) == 2);
}
