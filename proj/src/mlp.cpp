// SPDX-License-Identifier: Apache-2.0

#include "risvec/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace risvec {

Mlp::Mlp(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("mlp: need at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::init(std::mt19937_64& rng, double out_gain) {
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const double fan_in = static_cast<double>(sizes_[l]);
    const double gain = (l + 1 == layers) ? out_gain : 1.0;
    std::uniform_real_distribution<double> u(-gain * std::sqrt(3.0 / fan_in),
                                             gain * std::sqrt(3.0 / fan_in));
    const std::size_t w0 = weight_offset(l);
    for (std::size_t i = 0; i < sizes_[l + 1] * sizes_[l]; ++i) params_[w0 + i] = u(rng);
    const std::size_t b0 = bias_offset(l);
    for (std::size_t i = 0; i < sizes_[l + 1]; ++i) params_[b0 + i] = 0.0;
  }
}

Mlp::Trace Mlp::forward_trace(std::span<const double> input) const {
  if (input.size() != sizes_.front()) throw std::invalid_argument("mlp: input size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  Trace t(layers + 1);
  t[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    const std::vector<double>& x = t[l];
    std::vector<double>& y = t[l + 1];
    y.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = (l + 1 < layers) ? std::tanh(acc) : acc;
    }
  }
  return t;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  return std::move(forward_trace(input).back());
}

std::vector<double> Mlp::backward(const Trace& trace, std::span<const double> d_out,
                                  std::span<double> grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (grad.size() != params_.size()) throw std::invalid_argument("mlp: gradient size mismatch");
  std::vector<double> delta(d_out.begin(), d_out.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    // Through the activation of layer l (tanh on hidden layers).
    if (l + 1 < layers) {
      const std::vector<double>& y = trace[l + 1];
      for (std::size_t o = 0; o < out; ++o) delta[o] *= 1.0 - y[o] * y[o];
    }
    const std::vector<double>& x = trace[l];
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* grow = gw + o * in;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        grow[i] += d * x[i];
        prev[i] += d * row[i];
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

}  // namespace risvec
