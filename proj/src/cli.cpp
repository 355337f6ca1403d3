// SPDX-License-Identifier: Apache-2.0

#include "risvec/cli.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risvec/checkpoint.hpp"
#include "risvec/config.hpp"
#include "risvec/harness.hpp"

namespace risvec {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve_config(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) cfg.experiment.seeds = {*o.seed};
  if (!o.out.empty()) cfg.experiment.output = o.out;
  cfg.validate();
  return cfg;
}

int cmd_train(const Options& o, std::ostream& out) {
  ExperimentConfig cfg = resolve_config(o);
  const std::uint64_t seed = cfg.experiment.seeds.front();
  cfg.experiment.seeds = {seed};
  const fs::path dir = cfg.experiment.output;
  fs::create_directories(dir);
  Environment env(cfg.system, load_semantic_table(cfg));
  const std::size_t every = std::max<std::size_t>(1, cfg.agent.episodes / 20);
  TrainResult tr = train(env, cfg.agent, seed, [&](std::size_t e, double r) {
    if ((e + 1) % every == 0 || e + 1 == cfg.agent.episodes)
      out << "episode " << e + 1 << "/" << cfg.agent.episodes << " mean_reward " << format_real(r)
          << '\n' << std::flush;
  });

  const fs::path ckpt = o.checkpoint.empty() ? dir / "checkpoint.json" : fs::path(o.checkpoint);
  save_checkpoint(ckpt, {tr.params, tr.optimizers, env.normalization(), config_hash(cfg)});
  write_reward_curve(dir / "reward_curve.csv", tr.episode_mean_reward);
  ExperimentReport report;
  report.cells = 1;
  report.files = {"reward_curve.csv"};
  if (o.checkpoint.empty()) report.files.push_back("checkpoint.json");
  if (tr.aborted) report.failures.push_back({run_id(SweepAxis::None, 0, seed), "ppo", "non-finite loss"});
  write_manifest(dir, cfg, "train", report);
  out << "checkpoint " << ckpt.string() << '\n';
  return tr.aborted ? 2 : 0;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.checkpoint.empty()) throw UsageError("eval requires --checkpoint");
  ExperimentConfig cfg = resolve_config(o);
  const std::uint64_t seed = cfg.experiment.seeds.front();
  cfg.experiment.seeds = {seed};
  cfg.experiment.methods = {"ppo"};
  const Checkpoint ck = load_checkpoint(o.checkpoint);
  Environment env(cfg.system, load_semantic_table(cfg));
  if (ck.params.actor.input_dim() != env.obs_dim() || ck.params.actor.output_dim() != env.action_dim())
    throw std::runtime_error("checkpoint network shape does not match the configured scenario");
  if (ck.config_hash != config_hash(cfg))
    err << "warning: checkpoint was trained under a different config (hash " << ck.config_hash << ")\n";

  const fs::path dir = cfg.experiment.output;
  fs::create_directories(dir);
  const std::string id = run_id(SweepAxis::None, 0, seed);
  CellResult res = evaluate_trained(env, ck.params, cfg, seed, 1, id, 0.0);
  write_metrics_csv(dir / "metrics_ppo.csv", res.records);
  ExperimentReport report;
  report.cells = 1;
  report.files = {"metrics_ppo.csv"};
  write_manifest(dir, cfg, "eval", report);
  double mean = 0.0;
  for (double d : res.round_mean_delay) mean += d / static_cast<double>(res.round_mean_delay.size());
  out << "mean_total_delay " << format_real(mean) << '\n';
  return 0;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  ExperimentConfig cfg = resolve_config(o);
  std::vector<std::string> methods;
  for (const auto& m : cfg.experiment.methods)
    if (m == "ga" || m == "qpso" || m == "cophase") methods.push_back(m);
  if (methods.empty()) methods = {"ga", "qpso"};
  cfg.experiment.methods = methods;
  cfg.experiment.sweep = SweepAxis::None;
  cfg.experiment.values.clear();
  ExperimentReport report = run_experiment(cfg, cfg.experiment.output, &out);
  return report.failures.empty() ? 0 : 2;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(o);
  ExperimentReport report = run_experiment(cfg, cfg.experiment.output, &out);
  out << report.cells - report.failures.size() << "/" << report.cells << " cells succeeded\n";
  return report.failures.empty() ? 0 : 2;
}

int cmd_plot_data(const Options& o, std::ostream& out) {
  const fs::path dir = !o.out.empty() ? fs::path(o.out) : fs::path(resolve_config(o).experiment.output);
  out << write_summary(dir).string() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"RIS-assisted semantic vehicular edge computing simulator", "risvec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RISVEC_VERSION);
  Options o;
  std::uint64_t seed = 0;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed, overrides experiment.seeds");
    sub->add_option("--out", o.out, "output directory, overrides experiment.output");
    sub->add_option("--checkpoint", o.checkpoint, "checkpoint path");
    return sub;
  };
  CLI::App* train_cmd = add("train", "train the agent; writes a checkpoint and reward curve");
  CLI::App* eval_cmd = add("eval", "evaluate a checkpoint over test rounds");
  CLI::App* base_cmd = add("baseline", "run the GA/QPSO baselines");
  CLI::App* sweep_cmd = add("sweep", "run every (value, seed, method) cell of the config");
  CLI::App* plot_cmd = add("plot-data", "aggregate metrics CSVs into summary.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << RISVEC_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) o.seed = seed;

  try {
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out, err);
    if (base_cmd->parsed()) return cmd_baseline(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out);
    if (plot_cmd->parsed()) return cmd_plot_data(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace risvec
