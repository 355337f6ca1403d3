// SPDX-License-Identifier: Apache-2.0

#include "risvec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <fstream>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace risvec {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::Power: return "power";
    case SweepAxis::Vehicles: return "vehicles";
    case SweepAxis::RisElements: return "ris_elements";
  }
  return "none";
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "none") return SweepAxis::None;
  if (s == "power") return SweepAxis::Power;
  if (s == "vehicles") return SweepAxis::Vehicles;
  if (s == "ris_elements") return SweepAxis::RisElements;
  throw std::invalid_argument("expected none|power|vehicles|ris_elements, got '" + s + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty())
    throw std::invalid_argument("cannot parse '" + s + "' as a number");
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string format_number(T v) {
  return std::to_string(v);
}

std::string format_value(double v) { return format_number(v); }
std::string format_value(std::size_t v) { return format_number(v); }
std::string format_value(unsigned v) { return format_number(v); }
std::string format_value(int v) { return format_number(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }
std::string format_value(SweepAxis v) { return to_string(v); }
std::string format_value(RisServing v) {
  switch (v) {
    case RisServing::All: return "all";
    case RisServing::V2IOnly: return "v2i";
    case RisServing::V2VOnly: return "v2v";
  }
  return "all";
}
template <class T>
std::string format_value(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_value(v[i]);
  }
  return out;
}

template <class T>
void parse_value(const std::string& s, T& out) {
  if constexpr (std::is_same_v<T, bool>) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") out = true;
    else if (t == "false" || t == "0" || t == "no") out = false;
    else throw std::invalid_argument("expected true|false, got '" + t + "'");
  } else if constexpr (std::is_arithmetic_v<T>) {
    out = parse_number<T>(s);
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = trim(s);
  } else if constexpr (std::is_same_v<T, SweepAxis>) {
    out = parse_sweep_axis(trim(s));
  } else if constexpr (std::is_same_v<T, RisServing>) {
    const std::string t = trim(s);
    if (t == "all") out = RisServing::All;
    else if (t == "v2i") out = RisServing::V2IOnly;
    else if (t == "v2v") out = RisServing::V2VOnly;
    else throw std::invalid_argument("expected all|v2i|v2v, got '" + t + "'");
  } else {
    T items;
    for (const auto& item : split_list(s)) {
      typename T::value_type v;
      parse_value(item, v);
      items.push_back(std::move(v));
    }
    out = std::move(items);
  }
}

enum class Rule { Any, Positive, NonNegative, Unit };

template <class T>
std::optional<std::string> check_rule(const T& v, Rule rule) {
  if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>) {
    const double x = static_cast<double>(v);
    if (!std::isfinite(x)) return "must be finite";
    if (rule == Rule::Positive && !(x > 0)) return "must be positive (got " + format_value(v) + ")";
    if (rule == Rule::NonNegative && x < 0) return "must be nonnegative (got " + format_value(v) + ")";
    if (rule == Rule::Unit && !(x >= 0 && x <= 1))
      return "must lie in [0, 1] (got " + format_value(v) + ")";
  } else if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
    for (const auto& item : v)
      if (auto err = check_rule(item, rule)) return err;
  }
  return std::nullopt;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> check;

  std::string path() const { return section + "." + key; }
};

template <class Ref>
Field field(std::string section, std::string key, Ref ref, Rule rule = Rule::Any) {
  return {std::move(section), std::move(key),
          [ref](const ExperimentConfig& c) {
            return format_value(ref(const_cast<ExperimentConfig&>(c)));
          },
          [ref](ExperimentConfig& c, const std::string& s) { parse_value(s, ref(c)); },
          [ref, rule](const ExperimentConfig& c) {
            return check_rule(ref(const_cast<ExperimentConfig&>(c)), rule);
          }};
}

#define F(sec, key, expr, ...) \
  field(sec, key, [](ExperimentConfig& c) -> auto& { return expr; } __VA_OPT__(, ) __VA_ARGS__)

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      F("scenario", "vehicles", c.system.scenario.vehicles, Rule::Positive),
      F("scenario", "service_vehicles", c.system.scenario.service_vehicles, Rule::Positive),
      F("scenario", "resource_blocks", c.system.scenario.resource_blocks, Rule::Positive),
      F("scenario", "slot_duration", c.system.scenario.slot_duration, Rule::Positive),
      F("scenario", "speed", c.system.scenario.speed, Rule::Positive),
      F("scenario", "road_length", c.system.scenario.road_length, Rule::Positive),
      F("scenario", "lane_offsets", c.system.scenario.lane_offsets),
      F("scenario", "rsu_x", c.system.scenario.rsu_pos.x),
      F("scenario", "rsu_y", c.system.scenario.rsu_pos.y),
      F("scenario", "rsu_z", c.system.scenario.rsu_pos.z),
      F("scenario", "ris_x", c.system.scenario.ris_pos.x),
      F("scenario", "ris_y", c.system.scenario.ris_pos.y),
      F("scenario", "ris_z", c.system.scenario.ris_pos.z),
      F("scenario", "task_unit_bits", c.system.scenario.task_unit_bits, Rule::Positive),
      F("scenario", "arrival_mean", c.system.scenario.arrival_mean, Rule::NonNegative),
      F("scenario", "max_users_per_sv", c.system.scenario.max_users_per_sv, Rule::NonNegative),

      F("radio", "ref_loss", c.system.radio.ref_loss, Rule::Positive),
      F("radio", "path_exp_direct", c.system.radio.path_exp_direct, Rule::Positive),
      F("radio", "path_exp_ris_edge", c.system.radio.path_exp_ris_edge, Rule::Positive),
      F("radio", "path_exp_user_ris", c.system.radio.path_exp_user_ris, Rule::Positive),
      F("radio", "rician_factor", c.system.radio.rician_factor, Rule::NonNegative),
      F("radio", "carrier_frequency", c.system.radio.carrier_frequency, Rule::Positive),
      F("radio", "element_spacing", c.system.radio.element_spacing, Rule::NonNegative),
      F("radio", "ris_elements", c.system.radio.ris_elements, Rule::Positive),
      F("radio", "phase_bits", c.system.radio.phase_bits, Rule::Positive),
      F("radio", "tx_power", c.system.radio.tx_power, Rule::Positive),
      F("radio", "noise_power", c.system.radio.noise_power, Rule::Positive),
      F("radio", "bandwidth", c.system.radio.bandwidth, Rule::Positive),
      F("radio", "nlos", c.system.radio.nlos),
      F("radio", "ris_links", c.system.radio.ris_links),

      F("semantic", "units_per_sentence", c.system.semantic.units_per_sentence, Rule::Positive),
      F("semantic", "words_per_sentence", c.system.semantic.words_per_sentence, Rule::Positive),
      F("semantic", "bits_per_sentence", c.system.semantic.bits_per_sentence, Rule::Positive),
      F("semantic", "similarity_threshold", c.system.semantic.similarity_threshold, Rule::Unit),
      F("semantic", "nu_max", c.system.semantic.nu_max, Rule::Positive),
      F("semantic", "table", c.semantic_table),

      F("compute", "cycles_per_bit", c.system.compute.cycles_per_bit, Rule::Positive),
      F("compute", "local_freq", c.system.compute.local_freq, Rule::Positive),
      F("compute", "rsu_freq", c.system.compute.rsu_freq, Rule::Positive),
      F("compute", "sv_freq", c.system.compute.sv_freq, Rule::Positive),
      F("compute", "max_delay", c.system.compute.max_delay, Rule::Positive),

      F("agent", "hidden", c.agent.hidden, Rule::Positive),
      F("agent", "actor_lr", c.agent.actor_lr, Rule::Positive),
      F("agent", "critic_lr", c.agent.critic_lr, Rule::Positive),
      F("agent", "clip", c.agent.clip, Rule::Positive),
      F("agent", "discount", c.agent.discount, Rule::Unit),
      F("agent", "episodes", c.agent.episodes, Rule::Positive),
      F("agent", "steps_per_episode", c.agent.steps_per_episode, Rule::Positive),
      F("agent", "update_interval", c.agent.update_interval, Rule::Positive),
      F("agent", "epochs", c.agent.epochs, Rule::Positive),
      F("agent", "minibatch", c.agent.minibatch, Rule::Positive),
      F("agent", "value_coef", c.agent.value_coef, Rule::NonNegative),
      F("agent", "entropy_coef", c.agent.entropy_coef, Rule::NonNegative),
      F("agent", "init_log_std", c.agent.init_log_std),
      F("agent", "log_std_min", c.agent.log_std_min),
      F("agent", "log_std_max", c.agent.log_std_max),
      F("agent", "test_rounds", c.agent.test_rounds, Rule::Positive),
      F("agent", "test_slots", c.agent.test_slots, Rule::Positive),

      F("baseline", "budget", c.baseline.budget, Rule::Positive),
      F("baseline", "population", c.baseline.ga.population, Rule::Positive),
      F("baseline", "tournament", c.baseline.ga.tournament, Rule::Positive),
      F("baseline", "crossover_rate", c.baseline.ga.crossover_rate, Rule::Unit),
      F("baseline", "mutation_rate", c.baseline.ga.mutation_rate, Rule::Unit),
      F("baseline", "elites", c.baseline.ga.elites, Rule::NonNegative),
      F("baseline", "beta_start", c.baseline.qpso.beta_start, Rule::NonNegative),
      F("baseline", "beta_end", c.baseline.qpso.beta_end, Rule::NonNegative),

      F("experiment", "sweep", c.experiment.sweep),
      F("experiment", "values", c.experiment.values, Rule::Positive),
      F("experiment", "seeds", c.experiment.seeds),
      F("experiment", "methods", c.experiment.methods),
      F("experiment", "output", c.experiment.output),
  };
  return all;
}

#undef F

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

bool known_section(const std::string& s) {
  return std::any_of(fields().begin(), fields().end(),
                     [&](const Field& f) { return f.section == s; });
}

bool is_integral(double v) { return std::floor(v) == v; }

}  // namespace

void ExperimentConfig::validate() const {
  for (const auto& f : fields())
    if (auto err = f.check(*this)) throw ConfigError(f.path() + ": " + *err);

  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  wrap("scenario", [&] { system.scenario.validate(); });
  wrap("radio", [&] { system.radio.validate(); });
  wrap("semantic", [&] { system.semantic.validate(); });
  wrap("agent", [&] { agent.validate(); });

  if (agent.log_std_min > agent.log_std_max)
    throw ConfigError("agent.log_std_min: exceeds agent.log_std_max");
  if (baseline.budget < baseline.ga.population)
    throw ConfigError("baseline.budget: must be at least baseline.population");
  if (baseline.ga.elites >= baseline.ga.population)
    throw ConfigError("baseline.elites: must be below baseline.population");
  if (experiment.seeds.empty()) throw ConfigError("experiment.seeds: at least one seed required");
  if (experiment.methods.empty()) throw ConfigError("experiment.methods: at least one method required");
  for (const auto& m : experiment.methods)
    if (m != "ppo" && m != "ga" && m != "qpso" && m != "cophase")
      throw ConfigError("experiment.methods: unknown method '" + m + "'");
  if (experiment.sweep != SweepAxis::None && experiment.values.empty())
    throw ConfigError("experiment.values: a sweep needs at least one value");
  if (experiment.sweep == SweepAxis::Vehicles || experiment.sweep == SweepAxis::RisElements)
    for (double v : experiment.values)
      if (!is_integral(v))
        throw ConfigError("experiment.values: " + to_string(experiment.sweep) +
                          " sweep values must be integers");
  if (experiment.output.empty()) throw ConfigError("experiment.output: must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(source + ": key '" + section + "' appears outside a section");
    if (!known_section(section)) throw ConfigError(source + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) throw ConfigError(source + ": unknown key '" + section + "." + key + "'");
      try {
        f->set(cfg, value.data());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(f->path() + ": " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += '\n';
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_ini(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemConfig apply_sweep(const SystemConfig& base, SweepAxis axis, double value) {
  SystemConfig c = base;
  switch (axis) {
    case SweepAxis::None: break;
    case SweepAxis::Power: c.radio.tx_power = value; break;
    case SweepAxis::Vehicles: c.scenario.vehicles = static_cast<std::size_t>(std::llround(value)); break;
    case SweepAxis::RisElements:
      c.radio.ris_elements = static_cast<std::size_t>(std::llround(value));
      break;
  }
  return c;
}

}  // namespace risvec
