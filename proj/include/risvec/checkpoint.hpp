// SPDX-License-Identifier: Apache-2.0
//
// JSON checkpoint of a trained agent: layer shapes, weights, log-std, Adam
// moments, observation normalization and the hash of the producing config.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "risvec/environment.hpp"
#include "risvec/ppo.hpp"

namespace risvec {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  PolicyParams params;
  Optimizers optimizers;
  ObsNormalization normalization;
  std::string config_hash;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws std::runtime_error on I/O failure, unknown format or version, or
// inconsistent shapes.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace risvec
