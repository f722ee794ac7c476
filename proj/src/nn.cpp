// Copyright 2026 The ArtifactGen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "artifactgen/nn.hpp"

#include "artifactgen/error.hpp"

#include <cmath>

namespace artifactgen::nn {

Tensor ModelParams::add(const std::string& name, Tensor t) {
  for (const auto& n : names_) require(n != name, ErrorKind::internal, "duplicate parameter name " + name);
  t.set_requires_grad(true);
  t.zero_grad();
  names_.push_back(name);
  tensors_.push_back(t);
  return t;
}

const Tensor& ModelParams::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return tensors_[i];
  }
  fail(ErrorKind::invalid_argument, "no parameter named " + name);
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& t : tensors_) t.zero_grad();
}

double ModelParams::grad_norm() const {
  double s = 0.0;
  for (const auto& t : tensors_) {
    for (double g : t.grad()) s += g * g;
  }
  return std::sqrt(s);
}

std::vector<std::vector<double>> ModelParams::snapshot() const {
  std::vector<std::vector<double>> out;
  out.reserve(tensors_.size());
  for (const auto& t : tensors_) out.emplace_back(t.values().begin(), t.values().end());
  return out;
}

void ModelParams::load(const std::vector<std::vector<double>>& values) {
  require(values.size() == tensors_.size(), ErrorKind::format, "parameter count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto dst = tensors_[i].mutable_values();
    require(values[i].size() == dst.size(), ErrorKind::format, "parameter " + names_[i] + " size mismatch");
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

void ModelParams::init_ema() { shadow_ = snapshot(); }

void ModelParams::ema_update(double decay) {
  require(decay >= 0.0 && decay < 1.0, ErrorKind::invalid_argument, "ema decay must be in [0,1)");
  if (shadow_.empty()) init_ema();
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto live = tensors_[i].values();
    auto& sh = shadow_[i];
    for (std::size_t j = 0; j < sh.size(); ++j) sh[j] = decay * sh[j] + (1.0 - decay) * live[j];
  }
}

void ModelParams::set_ema(std::vector<std::vector<double>> shadow) {
  require(shadow.size() == tensors_.size(), ErrorKind::format, "EMA shadow count mismatch");
  for (std::size_t i = 0; i < shadow.size(); ++i) {
    require(shadow[i].size() == tensors_[i].size(), ErrorKind::format, "EMA shadow size mismatch for " + names_[i]);
  }
  shadow_ = std::move(shadow);
}

// ------------------------------------------------------------------ layers

namespace {

Tensor uniform(const Shape& shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> d(-bound, bound);
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) x = d(rng);
  return Tensor::from(shape, std::move(v));
}

}  // namespace

Tensor randn(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) x = d(rng);
  return Tensor::from(shape, std::move(v));
}

Tensor Linear::operator()(const Tensor& x) const {
  Tensor y = ad::matmul(x, ad::transpose(weight));
  return bias.defined() ? ad::add(y, bias) : y;
}

Tensor Conv1d::operator()(const Tensor& x) const {
  Tensor y = ad::conv1d(x, weight, stride, pad);
  return bias.defined() ? ad::add(y, ad::reshape(bias, {1, bias.size(), 1})) : y;
}

Tensor ConvTranspose1d::operator()(const Tensor& x) const {
  Tensor y = ad::conv_transpose1d(x, weight, stride, pad, output_padding);
  return bias.defined() ? ad::add(y, ad::reshape(bias, {1, bias.size(), 1})) : y;
}

Tensor Embedding::operator()(std::span<const int> index) const {
  return ad::matmul(one_hot(index, table.dim(0)), table);
}

Tensor GroupNorm::operator()(const Tensor& x) const { return ad::group_norm(x, groups, gamma, beta); }

Linear make_linear(ModelParams& p, const std::string& name, std::size_t in, std::size_t out, Rng& rng, bool bias) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Linear l;
  l.weight = p.add(name + ".weight", uniform({out, in}, bound, rng));
  if (bias) l.bias = p.add(name + ".bias", uniform({out}, bound, rng));
  return l;
}

Conv1d make_conv1d(ModelParams& p, const std::string& name, std::size_t in, std::size_t out, std::size_t kernel,
                   std::size_t stride, std::size_t pad, Rng& rng, bool bias) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in * kernel));
  Conv1d c;
  c.weight = p.add(name + ".weight", uniform({out, in, kernel}, bound, rng));
  if (bias) c.bias = p.add(name + ".bias", uniform({out}, bound, rng));
  c.stride = stride;
  c.pad = pad;
  return c;
}

ConvTranspose1d make_conv_transpose1d(ModelParams& p, const std::string& name, std::size_t in, std::size_t out,
                                      std::size_t kernel, std::size_t stride, std::size_t pad,
                                      std::size_t output_padding, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(out * kernel));
  ConvTranspose1d c;
  c.weight = p.add(name + ".weight", uniform({in, out, kernel}, bound, rng));
  c.bias = p.add(name + ".bias", uniform({out}, bound, rng));
  c.stride = stride;
  c.pad = pad;
  c.output_padding = output_padding;
  return c;
}

Embedding make_embedding(ModelParams& p, const std::string& name, std::size_t rows, std::size_t dim, Rng& rng,
                         double init_std) {
  Embedding e;
  e.table = p.add(name + ".table", ad::scale(randn({rows, dim}, rng), init_std).detach());
  return e;
}

GroupNorm make_group_norm(ModelParams& p, const std::string& name, std::size_t groups, std::size_t channels) {
  require(groups > 0 && channels % groups == 0, ErrorKind::invalid_argument,
          name + ": channels must be divisible by groups");
  GroupNorm g;
  g.groups = groups;
  g.gamma = p.add(name + ".gamma", Tensor::full({channels}, 1.0));
  g.beta = p.add(name + ".beta", Tensor::zeros({channels}));
  return g;
}

Tensor film(const Tensor& h, const Tensor& gamma, const Tensor& beta) {
  require(h.rank() == 3 && gamma.shape() == Shape{h.dim(0), h.dim(1)} && beta.shape() == gamma.shape(),
          ErrorKind::invalid_argument,
          "film: features " + ad::shape_str(h.shape()) + " vs modulation " + ad::shape_str(gamma.shape()));
  const Shape s{h.dim(0), h.dim(1), 1};
  return ad::add(ad::mul(h, ad::reshape(gamma, s)), ad::reshape(beta, s));
}

Tensor global_avg_pool1d(const Tensor& x) {
  require(x.rank() == 3, ErrorKind::invalid_argument, "global_avg_pool1d: expected [B,C,L]");
  const Tensor s = ad::sum_to(x, {x.dim(0), x.dim(1), 1});
  return ad::scale(ad::reshape(s, {x.dim(0), x.dim(1)}), 1.0 / static_cast<double>(x.dim(2)));
}

Tensor one_hot(std::span<const int> index, std::size_t classes) {
  std::vector<double> v(index.size() * classes, 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] >= 0 && static_cast<std::size_t>(index[i]) < classes, ErrorKind::invalid_argument,
            "label " + std::to_string(index[i]) + " out of range for " + std::to_string(classes) + " classes");
    v[i * classes + static_cast<std::size_t>(index[i])] = 1.0;
  }
  return Tensor::from({index.size(), classes}, std::move(v));
}

// ------------------------------------------------------------------ optimizers

void adam_step(std::span<double> theta, std::span<const double> grad, AdamMoments& state, const AdamConfig& cfg,
               std::uint64_t step) {
  require(cfg.lr > 0.0, ErrorKind::invalid_argument, "adam: learning rate must be positive");
  require(step >= 1, ErrorKind::invalid_argument, "adam: step count starts at 1");
  require(grad.size() == theta.size(), ErrorKind::invalid_argument, "adam: gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
  }
  require(state.m.size() == theta.size() && state.v.size() == theta.size(), ErrorKind::invalid_argument,
          "adam: moment shapes do not match parameters");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double g = grad[i];
    if (cfg.decoupled) {
      theta[i] -= cfg.lr * cfg.weight_decay * theta[i];
    } else if (cfg.weight_decay != 0.0) {
      g += cfg.weight_decay * theta[i];
    }
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

Adam::Adam(ModelParams& params, AdamConfig cfg) : params_(&params), cfg_(cfg), state_(params.size()) {
  require(cfg.lr > 0.0, ErrorKind::invalid_argument, "adam: learning rate must be positive");
}

void Adam::step() {
  ++step_;
  for (std::size_t i = 0; i < params_->size(); ++i) {
    Tensor& t = params_->at(i);
    if (t.grad().size() != t.size()) t.zero_grad();
    adam_step(t.mutable_values(), t.grad(), state_[i], cfg_, step_);
  }
}

void Adam::restore(std::uint64_t step, std::vector<AdamMoments> state) {
  require(state.size() == params_->size(), ErrorKind::format, "optimizer state count mismatch");
  step_ = step;
  state_ = std::move(state);
}

}  // namespace artifactgen::nn
