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

#include "artifactgen/checkpoint.hpp"
#include "artifactgen/nn.hpp"
#include "artifactgen/training.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace artifactgen::gan {

using ad::Tensor;

// Generator layout for output length L (L divisible by 10):
//   [z ; onehot(y)] -> linear -> widths[0] x L/10
//   -> conv_transpose(k9, s5, p2)            widths[1] x L/2
//   -> conv_transpose(k9, s2, p4, outpad 1)  widths[2] x L
//   -> conv(k9, p4)                          widths[3] x L
//   -> conv(k9, p4) -> tanh                  C x L
// leaky_relu(0.2) between layers.
struct GeneratorConfig {
  std::size_t latent_dim = 128;
  std::size_t classes = 5;
  std::size_t channels = 8;
  std::size_t length = 250;
  std::vector<std::size_t> widths = {128, 128, 64, 32};
};

enum class CriticNorm { none, group_norm };

// Critic mirrors the generator strides:
//   conv(k9, s1) -> conv(k9, s2) -> conv(k9, s5) -> conv(k9, s1) -> global average pool -> phi in R^h
// with h = widths.back(); D(x, y) = w^T phi(x) + <phi(x), e_y>.
struct CriticConfig {
  std::size_t classes = 5;
  std::size_t channels = 8;
  std::size_t length = 250;
  std::vector<std::size_t> widths = {32, 64, 128, 128};
  CriticNorm norm = CriticNorm::none;
};

class Generator {
 public:
  Generator(GeneratorConfig cfg, std::uint64_t seed);
  Generator(Generator&&) = default;
  Generator& operator=(Generator&&) = default;

  /// z [B, latent_dim], y in [0, K) -> [B, C, L] in (-1, 1).
  Tensor forward(const Tensor& z, std::span<const int> y) const;

  nn::ModelParams& params() { return params_; }
  const nn::ModelParams& params() const { return params_; }
  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  nn::ModelParams params_;
  nn::Linear seed_;
  nn::ConvTranspose1d up1_, up2_;
  nn::Conv1d refine_, out_;
};

class ProjectionCritic {
 public:
  /// Throws if the configuration uses an op without a second derivative.
  ProjectionCritic(CriticConfig cfg, std::uint64_t seed);
  ProjectionCritic(ProjectionCritic&&) = default;
  ProjectionCritic& operator=(ProjectionCritic&&) = default;

  /// phi(x): [B, h]
  Tensor features(const Tensor& x) const;
  /// D(x, y): [B]
  Tensor score(const Tensor& x, std::span<const int> y) const;
  /// w^T phi and <phi, e_y> separately, each [B].
  std::pair<Tensor, Tensor> score_terms(const Tensor& x, std::span<const int> y) const;

  nn::ModelParams& params() { return params_; }
  const nn::ModelParams& params() const { return params_; }
  const CriticConfig& config() const { return cfg_; }
  Tensor& head() { return head_.weight; }
  Tensor& embedding() { return embed_.table; }

 private:
  CriticConfig cfg_;
  nn::ModelParams params_;
  std::vector<nn::Conv1d> convs_;
  std::vector<nn::GroupNorm> norms_;
  nn::Linear head_;
  nn::Embedding embed_;
};

/// Any differentiable critic returning one score per batch row.
using CriticFn = std::function<Tensor(const Tensor& x, std::span<const int> y)>;

/// lambda * mean_b (||grad_x D(x_hat_b, y_b)||_2 - 1)^2 at the given points.
/// The result is differentiable w.r.t. the critic parameters.
Tensor gradient_penalty_at(const CriticFn& critic, const Tensor& x_hat, std::span<const int> y, double lambda,
                           std::vector<double>* grad_norms = nullptr);

/// Interpolates x_hat = a*real + (1-a)*fake with one a ~ U(0,1) per sample.
Tensor gradient_penalty(const CriticFn& critic, const Tensor& real, const Tensor& fake, std::span<const int> y,
                        double lambda, nn::Rng& rng, std::vector<double>* grad_norms = nullptr);

struct SpectralLossConfig {
  std::size_t nfft = 64;
  std::size_t hop = 16;
};

/// Mean absolute difference of Hann-windowed STFT magnitudes, per channel and
/// frame, paired row by row. Differentiable in both arguments.
Tensor spectral_l1(const Tensor& real, const Tensor& fake, const SpectralLossConfig& cfg = {});
/// Differentiable STFT magnitude of [B, C, L] -> [B*C, nfft/2+1, frames].
Tensor stft_magnitude_tensor(const Tensor& x, const SpectralLossConfig& cfg);

struct TrainConfig {
  double lambda_gp = 10.0;
  std::size_t n_critic = 5;
  std::size_t batch = 64;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double spectral_weight = 0.0;
  SpectralLossConfig spectral;
  std::size_t epochs = 1;
  std::size_t max_steps = 0;  // generator steps; 0 = epochs * ceil(N / batch)
  std::size_t patience = 0;   // generator steps without improvement; 0 = off
  std::size_t smooth_window = 50;
  std::uint64_t seed = 0;
};

struct LogRow {
  std::size_t step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double gp = 0.0;
  double spectral = 0.0;
};

struct TrainResult {
  std::vector<LogRow> log;
  std::size_t best_step = 0;
  double best_metric = 0.0;
  bool early_stopped = false;
  Checkpoint last;
  Checkpoint best;
};

/// Alternating WGAN-GP training on min-max normalized windows.
TrainResult train(const WindowBank& bank, const GeneratorConfig& gcfg, const CriticConfig& dcfg,
                  const TrainConfig& cfg);

std::string log_to_csv(const std::vector<LogRow>& log);

/// Loads the generator stored in a "gan" checkpoint.
Generator load_generator(const Checkpoint& ck);
ProjectionCritic load_critic(const Checkpoint& ck);

/// Draws `count` windows of class `label`; sample i uses latent noise seeded by (seed, i).
Tensor sample(const Generator& g, int label, std::size_t count, std::uint64_t seed, std::size_t batch = 64);

std::string generator_config_json(const GeneratorConfig& c);
std::string critic_config_json(const CriticConfig& c);

}  // namespace artifactgen::gan
