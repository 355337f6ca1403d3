// SPDX-License-Identifier: Apache-2.0
//
// Semantic similarity lookup delta = f(nu, SINR) and the semantic rate.

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace risvec {

struct SemanticParams {
  double units_per_sentence = 100.0;  // I_k
  double words_per_sentence = 20.0;   // L_k
  double bits_per_sentence = 1200.0;  // H
  double similarity_threshold = 0.9;  // delta_th
  int nu_max = 20;

  void validate() const;
};

// Dense grid of similarity values indexed by (SNR in dB, symbols per word).
class SemanticTable {
 public:
  SemanticTable(std::vector<double> snr_grid_db, std::vector<int> nu_grid,
                std::vector<double> delta);

  // delta = (1 - exp(-a nu)) * sigmoid(b (gamma_db - c)) sampled on an
  // integer-dB grid; stands in until a measured table is supplied.
  static SemanticTable synthetic(int nu_max = 20, double a = 0.3, double b = 0.5,
                                 double c = 2.0, double snr_lo_db = -20.0,
                                 double snr_hi_db = 40.0, double snr_step_db = 0.5);

  // CSV with header `gamma_db,nu,delta`; every (gamma, nu) pair of the grid
  // must be present exactly once.
  static SemanticTable load_csv(const std::filesystem::path& path);

  // Bilinear interpolation; SNR outside the grid clamps to the edge row.
  double similarity(double gamma_db, int nu) const;

  const std::vector<double>& snr_grid_db() const { return snr_; }
  const std::vector<int>& nu_grid() const { return nu_; }
  double at(std::size_t snr_index, std::size_t nu_index) const {
    return delta_[snr_index * nu_.size() + nu_index];
  }
  int nu_min() const { return nu_.front(); }
  int nu_max() const { return nu_.back(); }
  double max_entry() const;

 private:
  void validate() const;

  std::vector<double> snr_;
  std::vector<int> nu_;
  std::vector<double> delta_;  // row-major, snr x nu
};

std::optional<int> min_feasible_nu(const SemanticTable& table, double gamma_db,
                                   double threshold);

// R = W * I_k / (L_k * nu) * delta, in semantic units per second.
double semantic_rate(const SemanticParams& params, double bandwidth, int nu, double delta);

}  // namespace risvec
