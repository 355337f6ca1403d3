// SPDX-License-Identifier: Apache-2.0

#include "risvec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "risvec/baselines.hpp"

namespace risvec {

namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t cell_stream(std::uint64_t seed, const std::string& method) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char ch : method) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_comparison_method(const std::string& m) { return m == "ppo" || m == "ga" || m == "qpso"; }

std::size_t comparison_methods(const ExperimentConfig& cfg) {
  return static_cast<std::size_t>(std::count_if(cfg.experiment.methods.begin(),
                                                cfg.experiment.methods.end(), is_comparison_method));
}

MetricsRecord make_record(const std::string& id, std::uint64_t seed, double sweep_value,
                          const std::string& method, std::size_t slot, const SlotOutcome& o) {
  return {id,
          seed,
          sweep_value,
          method,
          slot,
          o.total_delay,
          o.mean_v2i_delay,
          o.mean_v2v_delay,
          o.violations(),
          o.reward()};
}

std::vector<double> sweep_values(const ExperimentConfig& cfg) {
  if (cfg.experiment.sweep == SweepAxis::None) return {0.0};
  return cfg.experiment.values;
}

}  // namespace

void write_metrics_csv(const fs::path& path, const std::vector<MetricsRecord>& rows) {
  auto out = open_out(path);
  out << kMetricsSchema << '\n' << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.seed << ',' << format_real(r.sweep_value) << ',' << r.method << ','
        << r.slot << ',' << format_real(r.total_delay) << ',' << format_real(r.v2i_delay) << ','
        << format_real(r.v2v_delay) << ',' << r.violations << ',' << format_real(r.reward) << '\n';
  }
}

std::vector<MetricsRecord> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<MetricsRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!header) {
      if (line != kMetricsHeader) throw std::runtime_error(where + ": unexpected metrics header");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw std::runtime_error(where + ": expected 10 columns");
    try {
      rows.push_back({f[0], std::stoull(f[1]), std::stod(f[2]), f[3], std::stoull(f[4]),
                      std::stod(f[5]), std::stod(f[6]), std::stod(f[7]), std::stoull(f[8]),
                      std::stod(f[9])});
    } catch (const std::logic_error&) {
      throw std::runtime_error(where + ": malformed number");
    }
  }
  if (!header) throw std::runtime_error(path.string() + ": missing metrics header");
  return rows;
}

void write_reward_curve(const fs::path& path, const std::vector<double>& rewards) {
  auto out = open_out(path);
  out << kRewardSchema << '\n' << kRewardHeader << '\n';
  for (std::size_t e = 0; e < rewards.size(); ++e) out << e << ',' << format_real(rewards[e]) << '\n';
}

std::shared_ptr<const SemanticTable> load_semantic_table(const ExperimentConfig& cfg) {
  if (cfg.semantic_table.empty())
    return std::make_shared<const SemanticTable>(SemanticTable::synthetic(cfg.system.semantic.nu_max));
  auto t = std::make_shared<const SemanticTable>(SemanticTable::load_csv(cfg.semantic_table));
  if (t->nu_min() > 1 || t->nu_max() < cfg.system.semantic.nu_max)
    throw std::runtime_error("semantic table " + cfg.semantic_table + " does not cover nu in [1, " +
                             std::to_string(cfg.system.semantic.nu_max) + "]");
  return t;
}

std::string run_id(SweepAxis axis, double value, std::uint64_t seed) {
  if (axis == SweepAxis::None) return "none-s" + std::to_string(seed);
  return to_string(axis) + "-" + format_real(value) + "-s" + std::to_string(seed);
}

CellResult evaluate_trained(Environment& env, const PolicyParams& params, const ExperimentConfig& cfg,
                            std::uint64_t seed, std::size_t budget, const std::string& id,
                            double sweep_value) {
  CellResult res;
  res.evaluations_per_slot = budget;
  const auto rounds =
      evaluate_policy(env, params, cfg.agent.test_rounds, cfg.agent.test_slots, seed, budget);
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    double sum = 0.0;
    for (std::size_t t = 0; t < rounds[r].size(); ++t) {
      const auto& rec = rounds[r][t];
      if (rec.evaluations != budget) res.evaluations_per_slot = rec.evaluations;
      res.records.push_back(make_record(id, seed, sweep_value, "ppo", r * cfg.agent.test_slots + t,
                                        rec.outcome));
      sum += rec.outcome.total_delay;
    }
    res.round_mean_delay.push_back(sum / static_cast<double>(rounds[r].size()));
  }
  return res;
}

CellResult run_cell(const ExperimentConfig& cfg, std::shared_ptr<const SemanticTable> table,
                    double sweep_value, std::uint64_t seed, const std::string& method) {
  const SystemConfig sys = apply_sweep(cfg.system, cfg.experiment.sweep, sweep_value);
  Environment env(sys, std::move(table));
  const std::string id = run_id(cfg.experiment.sweep, sweep_value, seed);

  if (method == "ppo") {
    TrainResult tr = train(env, cfg.agent, seed);
    const std::size_t budget = comparison_methods(cfg) > 1 ? cfg.baseline.budget : 1;
    CellResult res = evaluate_trained(env, tr.params, cfg, seed, budget, id, sweep_value);
    res.reward_curve = std::move(tr.episode_mean_reward);
    res.aborted = tr.aborted;
    return res;
  }
  if (method != "ga" && method != "qpso" && method != "cophase")
    throw std::invalid_argument("unknown method '" + method + "'");

  CellResult res;
  res.evaluations_per_slot = method == "cophase" ? 1 : cfg.baseline.budget;
  std::mt19937_64 rng(cell_stream(seed, method));
  const GenomeSpec spec = GenomeSpec::for_env(env);
  GaConfig ga = cfg.baseline.ga;
  QpsoConfig qpso = cfg.baseline.qpso;
  qpso.population = ga.population;
  for (std::size_t r = 0; r < cfg.agent.test_rounds; ++r) {
    env.reset(test_round_seed(seed, r));
    double sum = 0.0;
    for (std::size_t t = 0; t < cfg.agent.test_slots; ++t) {
      Decision d;
      if (method == "cophase") {
        d = env.heuristic_decision();
      } else {
        const FitnessFn fit = slot_fitness(env);
        const SearchResult sr = method == "ga"
                                    ? ga_optimize(spec, fit, cfg.baseline.budget, ga, rng)
                                    : qpso_optimize(spec, fit, cfg.baseline.budget, qpso, rng);
        if (sr.evaluations != cfg.baseline.budget) res.evaluations_per_slot = sr.evaluations;
        d = to_decision(sr.best);
      }
      const SlotOutcome o = env.evaluate(d);
      env.commit(d);
      res.records.push_back(make_record(id, seed, sweep_value, method, r * cfg.agent.test_slots + t, o));
      sum += o.total_delay;
    }
    res.round_mean_delay.push_back(sum / static_cast<double>(cfg.agent.test_slots));
  }
  return res;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const fs::path& out, std::ostream* log) {
  cfg.validate();
  fs::create_directories(out);
  ExperimentReport report;
  const auto table = load_semantic_table(cfg);
  const bool parity = comparison_methods(cfg) > 1;

  std::map<std::string, std::vector<MetricsRecord>> per_method;
  for (const auto& m : cfg.experiment.methods) per_method[m];
  std::ostringstream box;
  box << kBoxplotSchema << '\n' << kBoxplotHeader << '\n';

  for (double value : sweep_values(cfg)) {
    for (std::uint64_t seed : cfg.experiment.seeds) {
      const std::string id = run_id(cfg.experiment.sweep, value, seed);
      for (const auto& method : cfg.experiment.methods) {
        ++report.cells;
        if (log) *log << "cell " << id << " " << method << '\n' << std::flush;
        try {
          CellResult res = run_cell(cfg, table, value, seed, method);
          if (parity && is_comparison_method(method) &&
              res.evaluations_per_slot != cfg.baseline.budget)
            throw std::logic_error("budget parity violated: " + method + " spent " +
                                   std::to_string(res.evaluations_per_slot) + " evaluations per slot, expected " +
                                   std::to_string(cfg.baseline.budget));
          if (res.aborted) throw std::runtime_error("training aborted on a non-finite loss");
          auto& rows = per_method[method];
          rows.insert(rows.end(), res.records.begin(), res.records.end());
          for (std::size_t r = 0; r < res.round_mean_delay.size(); ++r)
            box << method << ',' << format_real(value) << ',' << seed << ',' << r << ','
                << format_real(res.round_mean_delay[r]) << '\n';
          if (!res.reward_curve.empty()) {
            const fs::path p = out / ("reward_curve_" + id + ".csv");
            write_reward_curve(p, res.reward_curve);
            report.files.push_back(p.filename());
          }
        } catch (const std::exception& e) {
          if (log) *log << "cell " << id << " " << method << " failed: " << e.what() << '\n';
          report.failures.push_back({id, method, e.what()});
        }
      }
    }
  }

  for (const auto& [method, rows] : per_method) {
    const fs::path p = out / ("metrics_" + method + ".csv");
    write_metrics_csv(p, rows);
    report.files.push_back(p.filename());
  }
  {
    auto f = open_out(out / "boxplot.csv");
    f << box.str();
    report.files.push_back("boxplot.csv");
  }
  report.files.push_back(write_summary(out).filename());
  write_manifest(out, cfg, "sweep", report);
  return report;
}

void write_manifest(const fs::path& out, const ExperimentConfig& cfg, const std::string& command,
                    const ExperimentReport& report) {
  fs::create_directories(out);
  {
    auto f = open_out(out / "config.ini");
    f << to_ini(cfg);
  }
  using nlohmann::ordered_json;
  const ObsNormalization n = ObsNormalization::from(cfg.system);
  std::set<std::string> files{"config.ini"};
  for (const auto& p : report.files) files.insert(p.generic_string());
  ordered_json failures = ordered_json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"run_id", f.run_id}, {"method", f.method}, {"error", f.error}});
  ordered_json j;
  j["format"] = "risvec-manifest";
  j["version"] = 1;
  j["code_version"] = RISVEC_VERSION;
  j["command"] = command;
  j["config"] = "config.ini";
  j["config_hash"] = config_hash(cfg);
  j["seeds"] = cfg.experiment.seeds;
  j["sweep"] = to_string(cfg.experiment.sweep);
  j["values"] = cfg.experiment.values;
  j["methods"] = cfg.experiment.methods;
  j["semantic_table"] = cfg.semantic_table.empty() ? "synthetic" : cfg.semantic_table;
  j["normalization"] = {{"x", {n.x_lo, n.x_hi}},
                        {"y", {n.y_lo, n.y_hi}},
                        {"z", {n.z_lo, n.z_hi}},
                        {"angle_scale", n.angle_scale},
                        {"sinr_db", {n.sinr_lo_db, n.sinr_hi_db}}};
  j["cells"] = report.cells;
  j["files"] = std::vector<std::string>(files.begin(), files.end());
  j["failures"] = failures;
  auto f = open_out(out / "manifest.json");
  f << j.dump(2) << '\n';
}

fs::path write_summary(const fs::path& dir) {
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("metrics_", 0) == 0 && entry.path().extension() == ".csv")
      inputs.push_back(entry.path());
  }
  if (inputs.empty()) throw std::runtime_error("no metrics_*.csv files in " + dir.string());
  std::sort(inputs.begin(), inputs.end());

  struct Acc {
    double total = 0, v2i = 0, v2v = 0, viol = 0;
    std::size_t n = 0;
  };
  // (method, sweep value) -> seed -> sums
  std::map<std::pair<std::string, double>, std::map<std::uint64_t, Acc>> groups;
  for (const auto& p : inputs)
    for (const auto& r : read_metrics_csv(p)) {
      Acc& a = groups[{r.method, r.sweep_value}][r.seed];
      a.total += r.total_delay;
      a.v2i += r.v2i_delay;
      a.v2v += r.v2v_delay;
      a.viol += static_cast<double>(r.violations);
      ++a.n;
    }

  const fs::path path = dir / "summary.csv";
  auto out = open_out(path);
  out << kSummarySchema << '\n' << kSummaryHeader << '\n';
  for (const auto& [key, seeds] : groups) {
    std::vector<double> totals;
    double v2i = 0, v2v = 0, viol = 0;
    for (const auto& [seed, a] : seeds) {
      const double n = static_cast<double>(a.n);
      totals.push_back(a.total / n);
      v2i += a.v2i / n;
      v2v += a.v2v / n;
      viol += a.viol / n;
    }
    const double s = static_cast<double>(seeds.size());
    double mean = 0;
    for (double t : totals) mean += t / s;
    double var = 0;
    for (double t : totals) var += (t - mean) * (t - mean);
    const double sd = totals.size() > 1 ? std::sqrt(var / (s - 1)) : 0.0;
    out << key.first << ',' << format_real(key.second) << ',' << seeds.size() << ','
        << format_real(mean) << ',' << format_real(sd) << ',' << format_real(v2i / s) << ','
        << format_real(v2v / s) << ',' << format_real(viol / s) << '\n';
  }
  return path;
}

}  // namespace risvec
