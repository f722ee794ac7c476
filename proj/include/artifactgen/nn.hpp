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

#pragma once

#include "artifactgen/autodiff.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace artifactgen::nn {

using ad::Shape;
using ad::Tensor;
using Rng = std::mt19937_64;

/// Named trainable tensors plus an optional EMA shadow copy.
class ModelParams {
 public:
  /// Registers a leaf and flags it trainable. Names must be unique.
  Tensor add(const std::string& name, Tensor t);

  std::size_t size() const { return tensors_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  Tensor& at(std::size_t i) { return tensors_[i]; }
  const Tensor& find(const std::string& name) const;
  std::size_t scalar_count() const;

  void zero_grad();
  double grad_norm() const;

  /// Copies of every parameter's values in registration order.
  std::vector<std::vector<double>> snapshot() const;
  /// Overwrites parameter values; shapes must match.
  void load(const std::vector<std::vector<double>>& values);

  void init_ema();
  bool has_ema() const { return !shadow_.empty(); }
  /// shadow <- decay * shadow + (1 - decay) * live
  void ema_update(double decay);
  const std::vector<std::vector<double>>& ema() const { return shadow_; }
  void set_ema(std::vector<std::vector<double>> shadow);

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::vector<std::vector<double>> shadow_;
};

// ------------------------------------------------------------------ layers

struct Linear {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out] or undefined
  Tensor operator()(const Tensor& x) const;  // [B, in] -> [B, out]
};

struct Conv1d {
  Tensor weight;  // [Co, Ci, K]
  Tensor bias;    // [Co] or undefined
  std::size_t stride = 1;
  std::size_t pad = 0;
  Tensor operator()(const Tensor& x) const;
};

struct ConvTranspose1d {
  Tensor weight;  // [Ci, Co, K]
  Tensor bias;
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t output_padding = 0;
  Tensor operator()(const Tensor& x) const;
};

struct Embedding {
  Tensor table;  // [N, D]
  Tensor operator()(std::span<const int> index) const;  // -> [B, D]
};

struct GroupNorm {
  std::size_t groups = 1;
  Tensor gamma;
  Tensor beta;
  Tensor operator()(const Tensor& x) const;
};

Linear make_linear(ModelParams& p, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                   bool bias = true);
Conv1d make_conv1d(ModelParams& p, const std::string& name, std::size_t in, std::size_t out, std::size_t kernel,
                   std::size_t stride, std::size_t pad, Rng& rng, bool bias = true);
ConvTranspose1d make_conv_transpose1d(ModelParams& p, const std::string& name, std::size_t in, std::size_t out,
                                      std::size_t kernel, std::size_t stride, std::size_t pad,
                                      std::size_t output_padding, Rng& rng);
Embedding make_embedding(ModelParams& p, const std::string& name, std::size_t rows, std::size_t dim, Rng& rng,
                         double init_std = 1.0);
GroupNorm make_group_norm(ModelParams& p, const std::string& name, std::size_t groups, std::size_t channels);

/// gamma * h + beta with gamma, beta [B, C] broadcast over time of h [B, C, L].
Tensor film(const Tensor& h, const Tensor& gamma, const Tensor& beta);
/// [B, C, L] -> [B, C]
Tensor global_avg_pool1d(const Tensor& x);
/// One-hot rows [B, K].
Tensor one_hot(std::span<const int> index, std::size_t classes);

/// Output length of a transposed convolution.
constexpr std::size_t conv_transpose_length(std::size_t in, std::size_t stride, std::size_t kernel, std::size_t pad,
                                            std::size_t output_padding = 0) {
  return (in - 1) * stride + kernel + output_padding - 2 * pad;
}
constexpr std::size_t conv_length(std::size_t in, std::size_t stride, std::size_t kernel, std::size_t pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

/// Standard-normal tensor.
Tensor randn(const Shape& shape, Rng& rng);

// ------------------------------------------------------------------ optimizers

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  bool decoupled = false;  // AdamW
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
};

/// One bias-corrected update of `theta`; `step` is the 1-based step count.
void adam_step(std::span<double> theta, std::span<const double> grad, AdamMoments& state, const AdamConfig& cfg,
               std::uint64_t step);

class Adam {
 public:
  Adam(ModelParams& params, AdamConfig cfg);

  /// Applies one update from the parameters' accumulated gradients.
  void step();
  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<AdamMoments>& moments() { return state_; }
  const std::vector<AdamMoments>& moments() const { return state_; }
  void restore(std::uint64_t step, std::vector<AdamMoments> state);

 private:
  ModelParams* params_;
  AdamConfig cfg_;
  std::vector<AdamMoments> state_;
  std::uint64_t step_ = 0;
};

}  // namespace artifactgen::nn
