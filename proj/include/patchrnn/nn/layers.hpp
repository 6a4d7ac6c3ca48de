// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "patchrnn/nn/tensor.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn::nn {

/// One LSTM direction. Gate blocks are stacked in the order input, forget,
/// candidate, output: W is (4h x in), U is (4h x h), b is (4h).
struct LstmParams {
  Tensor W;
  Tensor U;
  Tensor b;

  std::size_t input_dim() const { return W.cols(); }
  std::size_t hidden_dim() const { return U.cols(); }
  std::size_t parameter_count() const { return W.size() + U.size() + b.size(); }

  /// Weights uniform in +-1/sqrt(fan_in), biases zero except the forget
  /// gate, which starts at 1.
  static LstmParams create(std::size_t input_dim, std::size_t hidden_dim,
                           Rng& rng, const std::string& name);
  std::vector<Tensor> tensors() const { return {W, U, b}; }
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// Single step: i, f, o = sigmoid, g = tanh, c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    std::span<const double> h_prev,
                    std::span<const double> c_prev);

struct LstmRun {
  Tensor outputs;  // T x h; rows at or beyond `length` stay zero
  Tensor final_h;  // 1 x h, state after the last processed position
  Tensor final_c;
};

/// Runs positions [0, length) of x (T x in) from zero state, forwards or in
/// reverse (length-1 down to 0). Positions at or beyond `length` are padding
/// and are never read.
LstmRun lstm_sequence(Tape& tape, const LstmParams& params, const Tensor& x,
                      std::size_t length, bool reverse);

struct BiLstmRun {
  Tensor outputs;  // T x 2h, forward half first
  LstmRun forward;
  LstmRun backward;
};

BiLstmRun bilstm_forward(Tape& tape, const LstmParams& forward,
                         const LstmParams& backward, const Tensor& x,
                         std::size_t length);

struct Dense {
  Tensor W;  // out x in
  Tensor b;  // out

  static Dense create(std::size_t in, std::size_t out, Rng& rng,
                      const std::string& name);
  Tensor forward(Tape& tape, const Tensor& x) const;
  std::vector<Tensor> tensors() const { return {W, b}; }
};

/// Dense layers with ReLU between consecutive layers (none after the last).
struct DenseStack {
  std::vector<Dense> layers;

  /// dims = {in, hidden..., out}
  static DenseStack create(const std::vector<std::size_t>& dims, Rng& rng,
                           const std::string& name);
  Tensor forward(Tape& tape, const Tensor& x,
                 std::vector<std::size_t>* widths = nullptr) const;
  std::vector<Tensor> tensors() const;
};

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected moments.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig config = {});

  /// Applies one update from the parameters' accumulated gradients.
  void step();
  void zero_grad();
  std::size_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamConfig config_;
  std::size_t step_ = 0;
};

}  // namespace patchrnn::nn
