// SPDX-License-Identifier: Apache-2.0
//
// Fully connected network with tanh hidden layers and a linear output layer,
// with hand-written backpropagation, plus an Adam optimizer over flat
// parameter vectors.

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace risvec {

class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}
  explicit Mlp(std::vector<std::size_t> sizes);

  // Orthogonal-style scaled uniform init; output layer scaled by `out_gain`.
  void init(std::mt19937_64& rng, double out_gain = 0.01);

  // Activations of every layer; front() is the input, back() the output.
  using Trace = std::vector<std::vector<double>>;

  std::vector<double> forward(std::span<const double> input) const;
  Trace forward_trace(std::span<const double> input) const;

  // Accumulates dLoss/dparams into `grad` (same layout as params()) given
  // dLoss/doutput; returns dLoss/dinput.
  std::vector<double> backward(const Trace& trace, std::span<const double> d_out,
                               std::span<double> grad) const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }

 private:
  // Offset of layer l's weight block (out x in, row-major) and bias.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer + 1] * sizes_[layer];
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, AdamConfig cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad);

  const AdamConfig& config() const { return cfg_; }
  std::vector<double>& first_moment() { return m_; }
  std::vector<double>& second_moment() { return v_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  std::size_t steps() const { return t_; }
  void set_steps(std::size_t t) { t_ = t; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace risvec
