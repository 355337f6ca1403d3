// SPDX-License-Identifier: Apache-2.0

#include "risvec/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace risvec {

void SemanticParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("semantic: " + what); };
  if (!(units_per_sentence > 0.0)) fail("units_per_sentence must be positive");
  if (!(words_per_sentence > 0.0)) fail("words_per_sentence must be positive");
  if (!(bits_per_sentence > 0.0)) fail("bits_per_sentence must be positive");
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0))
    fail("similarity_threshold must lie in (0, 1]");
  if (nu_max < 1) fail("nu_max must be at least 1");
}

SemanticTable::SemanticTable(std::vector<double> snr_grid_db, std::vector<int> nu_grid,
                             std::vector<double> delta)
    : snr_(std::move(snr_grid_db)), nu_(std::move(nu_grid)), delta_(std::move(delta)) {
  validate();
}

void SemanticTable::validate() const {
  if (snr_.empty() || nu_.empty()) throw std::invalid_argument("semantic table: empty grid");
  if (delta_.size() != snr_.size() * nu_.size())
    throw std::invalid_argument("semantic table: grid size mismatch");
  if (!std::is_sorted(snr_.begin(), snr_.end()) ||
      std::adjacent_find(snr_.begin(), snr_.end()) != snr_.end())
    throw std::invalid_argument("semantic table: SNR grid must be strictly ascending");
  if (!std::is_sorted(nu_.begin(), nu_.end()) ||
      std::adjacent_find(nu_.begin(), nu_.end()) != nu_.end() || nu_.front() < 1)
    throw std::invalid_argument("semantic table: nu grid must be strictly ascending from >= 1");
  for (double d : delta_)
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("semantic table: delta outside [0, 1]");
  for (std::size_t i = 0; i < snr_.size(); ++i) {
    for (std::size_t j = 0; j < nu_.size(); ++j) {
      if (i > 0 && at(i, j) < at(i - 1, j))
        throw std::invalid_argument("semantic table: delta decreases along SNR");
      if (j > 0 && at(i, j) < at(i, j - 1))
        throw std::invalid_argument("semantic table: delta decreases along nu");
    }
  }
}

SemanticTable SemanticTable::synthetic(int nu_max, double a, double b, double c,
                                       double snr_lo_db, double snr_hi_db, double snr_step_db) {
  std::vector<double> snr;
  const auto steps = static_cast<long>(std::lround((snr_hi_db - snr_lo_db) / snr_step_db));
  for (long i = 0; i <= steps; ++i) snr.push_back(snr_lo_db + snr_step_db * static_cast<double>(i));
  std::vector<int> nu(static_cast<std::size_t>(nu_max));
  for (int v = 1; v <= nu_max; ++v) nu[static_cast<std::size_t>(v - 1)] = v;
  std::vector<double> delta;
  delta.reserve(snr.size() * nu.size());
  for (double g : snr) {
    const double sig = 1.0 / (1.0 + std::exp(-b * (g - c)));
    for (int v : nu) delta.push_back((1.0 - std::exp(-a * v)) * sig);
  }
  return SemanticTable(std::move(snr), std::move(nu), std::move(delta));
}

SemanticTable SemanticTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("semantic table: cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::map<std::pair<double, int>, double> cells;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "gamma_db,nu,delta")
        throw std::runtime_error("semantic table: expected header gamma_db,nu,delta");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string f0, f1, f2;
    if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2))
      throw std::runtime_error("semantic table: malformed row at line " + std::to_string(lineno));
    try {
      const double g = std::stod(f0);
      const int v = std::stoi(f1);
      const double d = std::stod(f2);
      if (!cells.emplace(std::make_pair(g, v), d).second)
        throw std::runtime_error("duplicate");
    } catch (const std::exception&) {
      throw std::runtime_error("semantic table: bad row at line " + std::to_string(lineno));
    }
  }
  if (cells.empty()) throw std::runtime_error("semantic table: no rows");

  std::vector<double> snr;
  std::vector<int> nu;
  for (const auto& [key, _] : cells) {
    if (snr.empty() || snr.back() != key.first) snr.push_back(key.first);
    if (std::find(nu.begin(), nu.end(), key.second) == nu.end()) nu.push_back(key.second);
  }
  std::sort(nu.begin(), nu.end());
  if (cells.size() != snr.size() * nu.size())
    throw std::runtime_error("semantic table: grid is not complete");
  std::vector<double> delta;
  delta.reserve(cells.size());
  for (double g : snr)
    for (int v : nu) {
      auto it = cells.find({g, v});
      if (it == cells.end()) throw std::runtime_error("semantic table: grid is not complete");
      delta.push_back(it->second);
    }
  return SemanticTable(std::move(snr), std::move(nu), std::move(delta));
}

double SemanticTable::similarity(double gamma_db, int nu) const {
  if (nu < nu_.front() || nu > nu_.back())
    throw std::out_of_range("semantic table: nu " + std::to_string(nu) + " outside grid");

  // Bracket along nu (integer grid, possibly sparse).
  auto nu_hi = std::lower_bound(nu_.begin(), nu_.end(), nu);
  std::size_t j1 = static_cast<std::size_t>(nu_hi - nu_.begin());
  std::size_t j0 = j1;
  double wn = 0.0;
  if (*nu_hi != nu) {
    j0 = j1 - 1;
    wn = static_cast<double>(nu - nu_[j0]) / static_cast<double>(nu_[j1] - nu_[j0]);
  }

  std::size_t i0 = 0, i1 = 0;
  double ws = 0.0;
  if (!(gamma_db > snr_.front())) {
    i0 = i1 = 0;
  } else if (gamma_db >= snr_.back()) {
    i0 = i1 = snr_.size() - 1;
  } else {
    auto hi = std::upper_bound(snr_.begin(), snr_.end(), gamma_db);
    i1 = static_cast<std::size_t>(hi - snr_.begin());
    i0 = i1 - 1;
    ws = (gamma_db - snr_[i0]) / (snr_[i1] - snr_[i0]);
  }

  auto row = [&](std::size_t i) { return (1.0 - wn) * at(i, j0) + wn * at(i, j1); };
  const double v = (1.0 - ws) * row(i0) + ws * row(i1);
  return std::clamp(v, 0.0, 1.0);
}

double SemanticTable::max_entry() const { return *std::max_element(delta_.begin(), delta_.end()); }

std::optional<int> min_feasible_nu(const SemanticTable& table, double gamma_db,
                                   double threshold) {
  // delta is nondecreasing in nu, so the first qualifying nu is the answer;
  // a binary search would do but the grid is tiny.
  for (int nu = table.nu_min(); nu <= table.nu_max(); ++nu)
    if (table.similarity(gamma_db, nu) >= threshold) return nu;
  return std::nullopt;
}

double semantic_rate(const SemanticParams& params, double bandwidth, int nu, double delta) {
  if (nu < 1) throw std::invalid_argument("semantic_rate: nu must be >= 1");
  return bandwidth * params.units_per_sentence / (params.words_per_sentence * nu) * delta;
}

}  // namespace risvec
