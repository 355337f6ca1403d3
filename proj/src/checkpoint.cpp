// SPDX-License-Identifier: Apache-2.0

#include "risvec/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace risvec {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "risvec-checkpoint";

json net_json(const Mlp& net) {
  return {{"sizes", net.sizes()},
          {"params", std::vector<double>(net.params().begin(), net.params().end())}};
}

Mlp net_from(const json& j, const char* what) {
  Mlp net(j.at("sizes").get<std::vector<std::size_t>>());
  const auto p = j.at("params").get<std::vector<double>>();
  if (p.size() != net.param_count())
    throw std::runtime_error(std::string("checkpoint: ") + what + " parameter count mismatch");
  std::copy(p.begin(), p.end(), net.params().begin());
  return net;
}

json adam_json(const Adam& a) {
  const auto& c = a.config();
  return {{"lr", c.lr},          {"beta1", c.beta1},           {"beta2", c.beta2},
          {"eps", c.eps},        {"steps", a.steps()},         {"m", a.first_moment()},
          {"v", a.second_moment()}};
}

Adam adam_from(const json& j, std::size_t n, const char* what) {
  AdamConfig c{j.at("lr").get<double>(), j.at("beta1").get<double>(), j.at("beta2").get<double>(),
               j.at("eps").get<double>()};
  Adam a(n, c);
  auto m = j.at("m").get<std::vector<double>>();
  auto v = j.at("v").get<std::vector<double>>();
  if (m.size() != n || v.size() != n)
    throw std::runtime_error(std::string("checkpoint: ") + what + " optimizer size mismatch");
  a.first_moment() = std::move(m);
  a.second_moment() = std::move(v);
  a.set_steps(j.at("steps").get<std::size_t>());
  return a;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto& n = ckpt.normalization;
  json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = ckpt.config_hash;
  j["actor"] = net_json(ckpt.params.actor);
  j["critic"] = net_json(ckpt.params.critic);
  j["log_std"] = ckpt.params.log_std;
  j["optimizer"] = {{"actor", adam_json(ckpt.optimizers.actor)},
                    {"log_std", adam_json(ckpt.optimizers.log_std)},
                    {"critic", adam_json(ckpt.optimizers.critic)}};
  j["normalization"] = {{"x", {n.x_lo, n.x_hi}},
                        {"y", {n.y_lo, n.y_hi}},
                        {"z", {n.z_lo, n.z_hi}},
                        {"angle_scale", n.angle_scale},
                        {"sinr_db", {n.sinr_lo_db, n.sinr_hi_db}}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint: malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw std::runtime_error("checkpoint: unknown format in " + path.string());
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

    Checkpoint c;
    c.config_hash = j.at("config_hash").get<std::string>();
    c.params.actor = net_from(j.at("actor"), "actor");
    c.params.critic = net_from(j.at("critic"), "critic");
    c.params.log_std = j.at("log_std").get<std::vector<double>>();
    if (c.params.log_std.size() != c.params.actor.output_dim())
      throw std::runtime_error("checkpoint: log_std length does not match the actor output");
    if (c.params.critic.output_dim() != 1 ||
        c.params.critic.input_dim() != c.params.actor.input_dim())
      throw std::runtime_error("checkpoint: critic shape inconsistent with actor");
    const auto& o = j.at("optimizer");
    c.optimizers.actor = adam_from(o.at("actor"), c.params.actor.param_count(), "actor");
    c.optimizers.log_std = adam_from(o.at("log_std"), c.params.log_std.size(), "log_std");
    c.optimizers.critic = adam_from(o.at("critic"), c.params.critic.param_count(), "critic");

    const auto& n = j.at("normalization");
    auto pair = [&](const char* k, double& lo, double& hi) {
      const auto v = n.at(k).get<std::vector<double>>();
      if (v.size() != 2) throw std::runtime_error(std::string("checkpoint: bad range ") + k);
      lo = v[0];
      hi = v[1];
    };
    pair("x", c.normalization.x_lo, c.normalization.x_hi);
    pair("y", c.normalization.y_lo, c.normalization.y_hi);
    pair("z", c.normalization.z_lo, c.normalization.z_hi);
    pair("sinr_db", c.normalization.sinr_lo_db, c.normalization.sinr_hi_db);
    c.normalization.angle_scale = n.at("angle_scale").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint: " + path.string() + ": " + e.what());
  }
}

}  // namespace risvec
