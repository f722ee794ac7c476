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
#include <span>
#include <string>
#include <vector>

namespace artifactgen::diffusion {

using ad::Shape;
using ad::Tensor;

/// Linear beta schedule. Index t runs 1..T; alpha_bar(0) is defined as 1.
class BetaSchedule {
 public:
  explicit BetaSchedule(std::size_t steps = 1000, double beta_first = 1e-4, double beta_last = 0.02);

  std::size_t steps() const { return beta_.size(); }
  double beta(std::size_t t) const;
  double alpha(std::size_t t) const { return 1.0 - beta(t); }
  double alpha_bar(std::size_t t) const;
  double beta_first() const { return beta_.front(); }
  double beta_last() const { return beta_.back(); }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;  // alpha_bar_[t], t = 0..T
};

/// sqrt(ab_t) * x0 + sqrt(1 - ab_t) * eps with one t for the whole tensor.
Tensor q_sample(const Tensor& x0, std::size_t t, const Tensor& eps, const BetaSchedule& sched);
/// Per-row timesteps; x0 and eps are [B, ...].
Tensor q_sample(const Tensor& x0, std::span<const std::size_t> t, const Tensor& eps, const BetaSchedule& sched);

/// Sinusoidal embedding of integer timesteps: [B, dim] = [sin(t f_i), cos(t f_i)].
Tensor timestep_embedding(std::span<const std::size_t> t, std::size_t dim);

struct UNetConfig {
  std::size_t channels = 8;
  std::size_t classes = 5;                         // null token is row `classes`
  std::vector<std::size_t> widths = {64, 128, 256};  // one entry per down level
  std::size_t embed_dim = 128;
  std::size_t groups = 8;
};

/// GN -> SiLU -> conv -> GN -> FiLM -> SiLU -> conv, plus a (1x1 if needed) skip.
struct ResBlock {
  nn::GroupNorm norm1, norm2;
  nn::Conv1d conv1, conv2;
  nn::Linear film;  // embed -> 2*out: (gamma offset, beta)
  nn::Conv1d skip;  // undefined weight when in == out
  std::size_t out = 0;

  Tensor operator()(const Tensor& x, const Tensor& cond) const;
  /// Explicit modulation; gamma/beta [B, out].
  Tensor modulated(const Tensor& x, const Tensor& gamma, const Tensor& beta) const;
  /// The same block with FiLM removed.
  Tensor unconditioned(const Tensor& x) const;
};

class UNet1D {
 public:
  UNet1D(UNetConfig cfg, std::uint64_t seed);
  UNet1D(UNet1D&&) = default;
  UNet1D& operator=(UNet1D&&) = default;

  /// x [B, C, L], t in [1, T], y in [0, K] -> eps estimate [B, C, L].
  /// L is zero-padded on the right to a multiple of 2^depth and the output cropped back.
  Tensor forward(const Tensor& x, std::span<const std::size_t> t, std::span<const int> y) const;
  /// Fused conditioning vector [B, embed_dim].
  Tensor condition(std::span<const std::size_t> t, std::span<const int> y) const;

  std::size_t null_label() const { return cfg_.classes; }
  std::size_t padded_length(std::size_t length) const;
  const UNetConfig& config() const { return cfg_; }
  nn::ModelParams& params() { return params_; }
  const nn::ModelParams& params() const { return params_; }
  const std::vector<ResBlock>& blocks() const { return blocks_; }

 private:
  UNetConfig cfg_;
  nn::ModelParams params_;
  nn::Linear time1_, time2_;
  nn::Embedding class_embed_;
  nn::Conv1d stem_;
  std::vector<ResBlock> blocks_;  // down..., mid, up...
  std::vector<nn::Conv1d> down_;
  std::vector<nn::ConvTranspose1d> up_;
  nn::GroupNorm out_norm_;
  nn::Conv1d out_conv_;
};

/// Draws t ~ U{1..T}, label dropout and eps per row; returns mean over rows of ||eps - net(x_t)||^2.
Tensor denoise_loss(const UNet1D& net, const Tensor& x0, std::span<const int> y, const BetaSchedule& sched,
                    double label_dropout, nn::Rng& rng);

/// Same loss with the random draws supplied.
Tensor denoise_loss_with(const UNet1D& net, const Tensor& x0, std::span<const std::size_t> t,
                         std::span<const int> y, const Tensor& eps, const BetaSchedule& sched);

/// eps_null + w (eps_cond - eps_null); w == 1 and w == 0 return the respective input unchanged.
Tensor cfg_epsilon(const Tensor& eps_cond, const Tensor& eps_null, double w);

struct SamplerConfig {
  std::size_t num_steps = 80;
  double guidance = 1.5;
  bool conditional_only = false;  // never evaluate the null branch
};

/// Uniform integer timesteps, strictly decreasing from T to 1.
std::vector<std::size_t> sampling_timesteps(std::size_t T, std::size_t num_steps);

/// eps predictor for a batch at a single timestep; labels may include the null token.
using EpsFn = std::function<Tensor(const Tensor& x, std::size_t t, std::span<const int> y)>;

/// Deterministic DDIM (eta = 0) from x_T = `noise`.
Tensor ddim_sample(const EpsFn& eps, const Tensor& noise, std::span<const int> y, int null_label,
                   const SamplerConfig& cfg, const BetaSchedule& sched);

/// Initial noise for `count` samples; row i depends only on (seed, i).
Tensor initial_noise(std::size_t count, std::size_t channels, std::size_t length, std::uint64_t seed);

Tensor sample(const UNet1D& net, int label, std::size_t count, std::size_t length, const SamplerConfig& cfg,
              const BetaSchedule& sched, std::uint64_t seed, std::size_t batch = 32);

struct DiffusionTrainConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 1e-4;
  double label_dropout = 0.1;
  std::size_t batch = 32;
  std::size_t epochs = 1;
  std::size_t max_steps = 0;  // 0 = epochs * ceil(N / batch)
  std::size_t patience = 0;
  std::size_t smooth_window = 50;
  double ema_decay = 0.999;
  bool ema_warmup = true;
  bool track_ema_loss = false;  // also evaluate the EMA weights on each step's draws
  std::uint64_t seed = 0;
};

struct LogRow {
  std::size_t step = 0;
  double loss = 0.0;
  double ema_loss = 0.0;
};

struct TrainResult {
  std::vector<LogRow> log;
  std::size_t best_step = 0;
  double best_metric = 0.0;
  bool early_stopped = false;
  Checkpoint last;
  Checkpoint best;
};

/// Effective EMA decay at update n (0-based).
double ema_decay_at(double decay, std::size_t n, bool warmup);

TrainResult train(const WindowBank& bank, const UNetConfig& ucfg, const BetaSchedule& sched,
                  const DiffusionTrainConfig& cfg);

std::string log_to_csv(const std::vector<LogRow>& log, bool with_ema);

struct LoadedModel {
  UNet1D net;
  BetaSchedule sched;
  std::size_t length = 0;
};

/// Uses the EMA weights when present unless `live` is set.
LoadedModel load_model(const Checkpoint& ck, bool live = false);

std::string unet_config_json(const UNetConfig& c);

}  // namespace artifactgen::diffusion
