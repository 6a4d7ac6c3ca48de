// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <memory>

#include "patchrnn/errors.hpp"
#include "patchrnn/nn/layers.hpp"
#include "patchrnn/nn/ops.hpp"

namespace patchrnn::nn {

namespace {

using RowVector = Eigen::RowVectorXd;
using Eigen::Index;

Tensor uniform_tensor(Shape shape, double bound, Rng& rng,
                      const std::string& name) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  t.set_name(name);
  return t;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activated gates from the pre-activation row a (4h).
void activate(const RowVector& a, Index h, RowVector& gates) {
  gates.resize(4 * h);
  for (Index k = 0; k < h; ++k) {
    gates[k] = sigmoid(a[k]);
    gates[h + k] = sigmoid(a[h + k]);
    gates[2 * h + k] = std::tanh(a[2 * h + k]);
    gates[3 * h + k] = sigmoid(a[3 * h + k]);
  }
}

struct SequenceCache {
  RowMatrix gates;   // L x 4h, activated
  RowMatrix cells;   // L x h
  RowMatrix h_prev;  // L x h, hidden state fed into each position
  RowMatrix c_prev;  // L x h
};

}  // namespace

LstmParams LstmParams::create(std::size_t input_dim, std::size_t hidden_dim,
                              Rng& rng, const std::string& name) {
  LstmParams p;
  p.W = uniform_tensor({4 * hidden_dim, input_dim},
                       1.0 / std::sqrt(static_cast<double>(input_dim)), rng,
                       name + ".W");
  p.U = uniform_tensor({4 * hidden_dim, hidden_dim},
                       1.0 / std::sqrt(static_cast<double>(hidden_dim)), rng,
                       name + ".U");
  p.b = Tensor::zeros({4 * hidden_dim}, true);
  p.b.set_name(name + ".b");
  for (std::size_t k = hidden_dim; k < 2 * hidden_dim; ++k) p.b[k] = 1.0;
  return p;
}

LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    std::span<const double> h_prev,
                    std::span<const double> c_prev) {
  const auto in = static_cast<Index>(params.input_dim());
  const auto h = static_cast<Index>(params.hidden_dim());
  if (static_cast<Index>(x.size()) != in ||
      static_cast<Index>(h_prev.size()) != h ||
      static_cast<Index>(c_prev.size()) != h) {
    throw DimensionMismatch("lstm_step: input/state sizes do not match params");
  }
  Eigen::Map<const RowVector> xv(x.data(), in);
  Eigen::Map<const RowVector> hv(h_prev.data(), h);
  Eigen::Map<const RowVector> bv(params.b.values().data(), 4 * h);
  RowVector a = xv * params.W.matrix().transpose() +
                hv * params.U.matrix().transpose() + bv;
  RowVector gates;
  activate(a, h, gates);
  LstmState next;
  next.h.resize(static_cast<std::size_t>(h));
  next.c.resize(static_cast<std::size_t>(h));
  for (Index k = 0; k < h; ++k) {
    const double c = gates[h + k] * c_prev[static_cast<std::size_t>(k)] +
                     gates[k] * gates[2 * h + k];
    next.c[static_cast<std::size_t>(k)] = c;
    next.h[static_cast<std::size_t>(k)] = gates[3 * h + k] * std::tanh(c);
  }
  return next;
}

LstmRun lstm_sequence(Tape& tape, const LstmParams& params, const Tensor& x,
                      std::size_t length, bool reverse) {
  const std::size_t T = x.rows();
  const auto h = static_cast<Index>(params.hidden_dim());
  if (x.cols() != params.input_dim()) {
    throw DimensionMismatch("lstm_sequence: input width " +
                            std::to_string(x.cols()) + " != " +
                            std::to_string(params.input_dim()));
  }
  if (length > T) {
    throw DimensionMismatch("lstm_sequence: length " + std::to_string(length) +
                            " exceeds sequence of " + std::to_string(T));
  }
  const bool grad = x.requires_grad() || params.W.requires_grad() ||
                    params.U.requires_grad() || params.b.requires_grad();
  LstmRun run;
  run.outputs = Tensor::zeros({T, static_cast<std::size_t>(h)}, grad);
  run.final_h = Tensor::zeros({1, static_cast<std::size_t>(h)}, grad);
  run.final_c = Tensor::zeros({1, static_cast<std::size_t>(h)}, grad);
  if (length == 0) return run;

  const auto L = static_cast<Index>(length);
  auto cache = std::make_shared<SequenceCache>();
  cache->gates.resize(L, 4 * h);
  cache->cells.resize(L, h);
  cache->h_prev.resize(L, h);
  cache->c_prev.resize(L, h);

  Eigen::Map<const RowVector> bias(params.b.values().data(), 4 * h);
  RowMatrix pre = x.matrix().topRows(L) * params.W.matrix().transpose();
  pre.rowwise() += bias;
  const auto U = params.U.matrix();

  auto outputs = run.outputs.matrix();
  RowVector hv = RowVector::Zero(h);
  RowVector cv = RowVector::Zero(h);
  RowVector a(4 * h);
  RowVector gates;
  for (Index s = 0; s < L; ++s) {
    const Index t = reverse ? L - 1 - s : s;
    a.noalias() = pre.row(t);
    a.noalias() += hv * U.transpose();
    activate(a, h, gates);
    cache->h_prev.row(t) = hv;
    cache->c_prev.row(t) = cv;
    for (Index k = 0; k < h; ++k) {
      cv[k] = gates[h + k] * cv[k] + gates[k] * gates[2 * h + k];
      hv[k] = gates[3 * h + k] * std::tanh(cv[k]);
    }
    cache->gates.row(t) = gates;
    cache->cells.row(t) = cv;
    outputs.row(t) = hv;
  }
  run.final_h.matrix().row(0) = hv;
  run.final_c.matrix().row(0) = cv;
  check_finite(run.outputs.values(), "lstm_sequence");

  if (grad) {
    tape.record([params = params, x = x, run, cache, L, h, reverse]() mutable {
      if (!run.outputs.has_grad() && !run.final_h.has_grad() &&
          !run.final_c.has_grad()) {
        return;
      }
      RowVector dh_next = run.final_h.has_grad()
                              ? RowVector(run.final_h.grad_matrix().row(0))
                              : RowVector::Zero(h);
      RowVector dc_next = run.final_c.has_grad()
                              ? RowVector(run.final_c.grad_matrix().row(0))
                              : RowVector::Zero(h);
      const bool has_dout = run.outputs.has_grad();
      RowMatrix dA(L, 4 * h);
      const auto U = params.U.matrix();
      RowVector dh(h);
      for (Index s = L - 1; s >= 0; --s) {
        const Index t = reverse ? L - 1 - s : s;
        dh = dh_next;
        if (has_dout) dh += run.outputs.grad_matrix().row(t);
        auto g = cache->gates.row(t);
        for (Index k = 0; k < h; ++k) {
          const double i = g[k], f = g[h + k], cand = g[2 * h + k],
                       o = g[3 * h + k];
          const double tc = std::tanh(cache->cells(t, k));
          const double d_o = dh[k] * tc;
          const double dc = dh[k] * o * (1.0 - tc * tc) + dc_next[k];
          dA(t, k) = dc * cand * i * (1.0 - i);
          dA(t, h + k) = dc * cache->c_prev(t, k) * f * (1.0 - f);
          dA(t, 2 * h + k) = dc * i * (1.0 - cand * cand);
          dA(t, 3 * h + k) = d_o * o * (1.0 - o);
          dc_next[k] = dc * f;
        }
        dh_next.noalias() = dA.row(t) * U;
      }
      if (params.W.requires_grad()) {
        params.W.grad_matrix().noalias() +=
            dA.transpose() * x.matrix().topRows(L);
      }
      if (params.U.requires_grad()) {
        params.U.grad_matrix().noalias() += dA.transpose() * cache->h_prev;
      }
      if (params.b.requires_grad()) {
        Eigen::Map<RowVector>(params.b.grad().data(), 4 * h) +=
            dA.colwise().sum();
      }
      if (x.requires_grad()) {
        x.grad_matrix().topRows(L).noalias() += dA * params.W.matrix();
      }
    });
  }
  return run;
}

BiLstmRun bilstm_forward(Tape& tape, const LstmParams& forward,
                         const LstmParams& backward, const Tensor& x,
                         std::size_t length) {
  BiLstmRun run;
  run.forward = lstm_sequence(tape, forward, x, length, false);
  run.backward = lstm_sequence(tape, backward, x, length, true);
  run.outputs = concat_cols(tape, {run.forward.outputs, run.backward.outputs});
  return run;
}

Dense Dense::create(std::size_t in, std::size_t out, Rng& rng,
                    const std::string& name) {
  Dense d;
  d.W = uniform_tensor({out, in}, 1.0 / std::sqrt(static_cast<double>(in)), rng,
                       name + ".W");
  d.b = Tensor::zeros({out}, true);
  d.b.set_name(name + ".b");
  return d;
}

Tensor Dense::forward(Tape& tape, const Tensor& x) const {
  return linear(tape, x, W, b);
}

DenseStack DenseStack::create(const std::vector<std::size_t>& dims, Rng& rng,
                              const std::string& name) {
  DenseStack stack;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    stack.layers.push_back(
        Dense::create(dims[i], dims[i + 1], rng, name + "." + std::to_string(i)));
  }
  return stack;
}

Tensor DenseStack::forward(Tape& tape, const Tensor& x,
                           std::vector<std::size_t>* widths) const {
  Tensor y = x;
  if (widths) widths->push_back(y.cols());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i > 0) y = relu(tape, y);
    y = layers[i].forward(tape, y);
    if (widths) widths->push_back(y.cols());
  }
  return y;
}

std::vector<Tensor> DenseStack::tensors() const {
  std::vector<Tensor> out;
  for (const Dense& d : layers) {
    out.push_back(d.W);
    out.push_back(d.b);
  }
  return out;
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (const Tensor& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = params_[k];
    if (!p.has_grad()) continue;
    auto g = p.grad();
    auto w = p.values();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

}  // namespace patchrnn::nn
