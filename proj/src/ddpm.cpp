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

#include "artifactgen/ddpm.hpp"

#include "artifactgen/error.hpp"
#include "artifactgen/hash.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace artifactgen::diffusion {

using nlohmann::json;

// ------------------------------------------------------------------ schedule

BetaSchedule::BetaSchedule(std::size_t steps, double beta_first, double beta_last) {
  require(steps >= 1, ErrorKind::config, "diffusion schedule needs at least one step");
  require(beta_first > 0.0 && beta_first <= beta_last && beta_last < 1.0, ErrorKind::config,
          "beta schedule must satisfy 0 < beta_1 <= beta_T < 1");
  beta_.resize(steps);
  alpha_bar_.resize(steps + 1);
  alpha_bar_[0] = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    beta_[i] = beta_first + f * (beta_last - beta_first);
    alpha_bar_[i + 1] = alpha_bar_[i] * (1.0 - beta_[i]);
  }
}

double BetaSchedule::beta(std::size_t t) const {
  require(t >= 1 && t <= steps(), ErrorKind::invalid_argument,
          "timestep " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
  return beta_[t - 1];
}

double BetaSchedule::alpha_bar(std::size_t t) const {
  require(t <= steps(), ErrorKind::invalid_argument,
          "timestep " + std::to_string(t) + " outside [0, " + std::to_string(steps()) + "]");
  return alpha_bar_[t];
}

Tensor q_sample(const Tensor& x0, std::size_t t, const Tensor& eps, const BetaSchedule& sched) {
  require(t >= 1 && t <= sched.steps(), ErrorKind::invalid_argument,
          "q_sample: timestep " + std::to_string(t) + " outside [1, " + std::to_string(sched.steps()) + "]");
  require(x0.shape() == eps.shape(), ErrorKind::invalid_argument, "q_sample: x0 and eps shapes differ");
  const double ab = sched.alpha_bar(t);
  return ad::add(ad::scale(x0, std::sqrt(ab)), ad::scale(eps, std::sqrt(1.0 - ab)));
}

Tensor q_sample(const Tensor& x0, std::span<const std::size_t> t, const Tensor& eps, const BetaSchedule& sched) {
  require(x0.shape() == eps.shape(), ErrorKind::invalid_argument, "q_sample: x0 and eps shapes differ");
  require(x0.rank() >= 1 && x0.dim(0) == t.size(), ErrorKind::invalid_argument,
          "q_sample: one timestep per row required");
  Shape col(x0.rank(), 1);
  col[0] = t.size();
  std::vector<double> a(t.size()), s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(t[i] >= 1 && t[i] <= sched.steps(), ErrorKind::invalid_argument,
            "q_sample: timestep " + std::to_string(t[i]) + " out of range");
    const double ab = sched.alpha_bar(t[i]);
    a[i] = std::sqrt(ab);
    s[i] = std::sqrt(1.0 - ab);
  }
  return ad::add(ad::mul(x0, Tensor::from(col, std::move(a))), ad::mul(eps, Tensor::from(col, std::move(s))));
}

Tensor timestep_embedding(std::span<const std::size_t> t, std::size_t dim) {
  require(dim >= 2 && dim % 2 == 0, ErrorKind::invalid_argument, "timestep embedding dim must be even");
  const std::size_t half = dim / 2;
  std::vector<double> v(t.size() * dim);
  for (std::size_t b = 0; b < t.size(); ++b) {
    for (std::size_t i = 0; i < half; ++i) {
      const double f = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
      v[b * dim + i] = std::sin(static_cast<double>(t[b]) * f);
      v[b * dim + half + i] = std::cos(static_cast<double>(t[b]) * f);
    }
  }
  return Tensor::from({t.size(), dim}, std::move(v));
}

// ------------------------------------------------------------------ U-Net

namespace {

std::size_t group_count(std::size_t wanted, std::size_t channels) { return std::gcd(wanted, channels); }

ResBlock make_block(nn::ModelParams& p, const std::string& name, std::size_t in, std::size_t out,
                    const UNetConfig& cfg, nn::Rng& rng) {
  ResBlock b;
  b.out = out;
  b.norm1 = nn::make_group_norm(p, name + ".norm1", group_count(cfg.groups, in), in);
  b.conv1 = nn::make_conv1d(p, name + ".conv1", in, out, 3, 1, 1, rng);
  b.norm2 = nn::make_group_norm(p, name + ".norm2", group_count(cfg.groups, out), out);
  b.film = nn::make_linear(p, name + ".film", cfg.embed_dim, 2 * out, rng);
  b.conv2 = nn::make_conv1d(p, name + ".conv2", out, out, 3, 1, 1, rng);
  if (in != out) b.skip = nn::make_conv1d(p, name + ".skip", in, out, 1, 1, 0, rng);
  return b;
}

}  // namespace

Tensor ResBlock::modulated(const Tensor& x, const Tensor& gamma, const Tensor& beta) const {
  Tensor h = conv1(ad::silu(norm1(x)));
  h = nn::film(norm2(h), gamma, beta);
  h = conv2(ad::silu(h));
  return ad::add(skip.weight.defined() ? skip(x) : x, h);
}

Tensor ResBlock::unconditioned(const Tensor& x) const {
  Tensor h = conv1(ad::silu(norm1(x)));
  h = conv2(ad::silu(norm2(h)));
  return ad::add(skip.weight.defined() ? skip(x) : x, h);
}

Tensor ResBlock::operator()(const Tensor& x, const Tensor& cond) const {
  const Tensor mod = film(ad::silu(cond));
  const Tensor gamma = ad::add_scalar(ad::narrow(mod, 1, 0, out), 1.0);
  const Tensor beta = ad::narrow(mod, 1, out, out);
  return modulated(x, gamma, beta);
}

UNet1D::UNet1D(UNetConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  require(!cfg_.widths.empty(), ErrorKind::config, "unet: at least one width required");
  require(cfg_.channels > 0 && cfg_.classes > 0, ErrorKind::config, "unet: channels and classes must be positive");
  require(cfg_.embed_dim >= 2 && cfg_.embed_dim % 2 == 0, ErrorKind::config, "unet: embed_dim must be even");
  nn::Rng rng(seed);
  const std::size_t e = cfg_.embed_dim;
  time1_ = nn::make_linear(params_, "time.0", e, e, rng);
  time2_ = nn::make_linear(params_, "time.1", e, e, rng);
  class_embed_ = nn::make_embedding(params_, "class_embedding", cfg_.classes + 1, e, rng);
  stem_ = nn::make_conv1d(params_, "stem", cfg_.channels, cfg_.widths[0], 3, 1, 1, rng);

  std::size_t cur = cfg_.widths[0];
  for (std::size_t i = 0; i < cfg_.widths.size(); ++i) {
    const std::size_t w = cfg_.widths[i];
    blocks_.push_back(make_block(params_, "down" + std::to_string(i), cur, w, cfg_, rng));
    down_.push_back(nn::make_conv1d(params_, "downsample" + std::to_string(i), w, w, 4, 2, 1, rng));
    cur = w;
  }
  blocks_.push_back(make_block(params_, "mid", cur, cur, cfg_, rng));
  for (std::size_t k = cfg_.widths.size(); k-- > 0;) {
    const std::size_t w = cfg_.widths[k];
    up_.push_back(nn::make_conv_transpose1d(params_, "upsample" + std::to_string(k), cur, cur, 4, 2, 1, 0, rng));
    blocks_.push_back(make_block(params_, "up" + std::to_string(k), cur + w, w, cfg_, rng));
    cur = w;
  }
  out_norm_ = nn::make_group_norm(params_, "out.norm", group_count(cfg_.groups, cur), cur);
  out_conv_ = nn::make_conv1d(params_, "out.conv", cur, cfg_.channels, 3, 1, 1, rng);
}

std::size_t UNet1D::padded_length(std::size_t length) const {
  const std::size_t m = std::size_t{1} << cfg_.widths.size();
  return (length + m - 1) / m * m;
}

Tensor UNet1D::condition(std::span<const std::size_t> t, std::span<const int> y) const {
  require(t.size() == y.size(), ErrorKind::invalid_argument, "unet: timestep and label counts differ");
  for (int label : y) {
    require(label >= 0 && static_cast<std::size_t>(label) <= cfg_.classes, ErrorKind::invalid_argument,
            "unet: label " + std::to_string(label) + " outside [0, " + std::to_string(cfg_.classes) + "]");
  }
  const Tensor temb = time2_(ad::silu(time1_(timestep_embedding(t, cfg_.embed_dim))));
  return ad::add(temb, class_embed_(y));
}

Tensor UNet1D::forward(const Tensor& x, std::span<const std::size_t> t, std::span<const int> y) const {
  require(x.rank() == 3 && x.dim(1) == cfg_.channels && x.dim(0) == t.size(), ErrorKind::invalid_argument,
          "unet: expected [B," + std::to_string(cfg_.channels) + ",L], got " + ad::shape_str(x.shape()));
  const std::size_t length = x.dim(2);
  const std::size_t padded = padded_length(length);
  const Tensor cond = condition(t, y);

  Tensor h = stem_(padded == length ? x : ad::pad(x, 2, 0, padded - length));
  const std::size_t depth = cfg_.widths.size();
  std::vector<Tensor> skips;
  for (std::size_t i = 0; i < depth; ++i) {
    h = blocks_[i](h, cond);
    skips.push_back(h);
    h = down_[i](h);
  }
  h = blocks_[depth](h, cond);
  for (std::size_t j = 0; j < depth; ++j) {
    h = up_[j](h);
    h = ad::concat({h, skips[depth - 1 - j]}, 1);
    h = blocks_[depth + 1 + j](h, cond);
  }
  h = out_conv_(ad::silu(out_norm_(h)));
  return padded == length ? h : ad::narrow(h, 2, 0, length);
}

// ------------------------------------------------------------------ loss

Tensor denoise_loss_with(const UNet1D& net, const Tensor& x0, std::span<const std::size_t> t,
                         std::span<const int> y, const Tensor& eps, const BetaSchedule& sched) {
  const Tensor xt = q_sample(x0, t, eps, sched);
  const Tensor diff = ad::sub(eps, net.forward(xt, t, y));
  return ad::scale(ad::sum(ad::square(diff)), 1.0 / static_cast<double>(x0.dim(0)));
}

Tensor denoise_loss(const UNet1D& net, const Tensor& x0, std::span<const int> y, const BetaSchedule& sched,
                    double label_dropout, nn::Rng& rng) {
  require(label_dropout >= 0.0 && label_dropout < 1.0 + 1e-12, ErrorKind::invalid_argument,
          "label dropout must lie in [0, 1]");
  require(x0.dim(0) == y.size(), ErrorKind::invalid_argument, "denoise_loss: batch and label counts differ");
  const std::size_t nb = x0.dim(0);
  std::uniform_int_distribution<std::size_t> pick_t(1, sched.steps());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> t(nb);
  std::vector<int> labels(y.begin(), y.end());
  for (std::size_t b = 0; b < nb; ++b) {
    t[b] = pick_t(rng);
    if (unif(rng) < label_dropout) labels[b] = static_cast<int>(net.null_label());
  }
  const Tensor eps = nn::randn(x0.shape(), rng);
  return denoise_loss_with(net, x0, t, labels, eps, sched);
}

// ------------------------------------------------------------------ sampling

Tensor cfg_epsilon(const Tensor& eps_cond, const Tensor& eps_null, double w) {
  require(eps_cond.shape() == eps_null.shape(), ErrorKind::invalid_argument, "cfg: branch shapes differ");
  if (w == 1.0) return eps_cond;
  if (w == 0.0) return eps_null;
  return ad::add(eps_null, ad::scale(ad::sub(eps_cond, eps_null), w));
}

std::vector<std::size_t> sampling_timesteps(std::size_t T, std::size_t num_steps) {
  require(num_steps >= 1 && num_steps <= T, ErrorKind::config,
          "sampling steps must lie in [1, " + std::to_string(T) + "], got " + std::to_string(num_steps));
  std::vector<std::size_t> ts(num_steps);
  if (num_steps == 1) {
    ts[0] = T;
    return ts;
  }
  for (std::size_t i = 0; i < num_steps; ++i) {
    const double f = static_cast<double>(num_steps - 1 - i) / static_cast<double>(num_steps - 1);
    ts[i] = static_cast<std::size_t>(std::llround(1.0 + f * static_cast<double>(T - 1)));
  }
  return ts;
}

Tensor ddim_sample(const EpsFn& eps_fn, const Tensor& noise, std::span<const int> y, int null_label,
                   const SamplerConfig& cfg, const BetaSchedule& sched) {
  ad::NoGradGuard no_grad;
  const auto ts = sampling_timesteps(sched.steps(), cfg.num_steps);
  const std::vector<int> nulls(y.size(), null_label);
  const bool need_cond = cfg.conditional_only || cfg.guidance != 0.0;
  const bool need_null = !cfg.conditional_only && cfg.guidance != 1.0;
  Tensor x = noise;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::size_t t = ts[i];
    const std::size_t t_prev = i + 1 < ts.size() ? ts[i + 1] : 0;
    Tensor eps;
    if (need_cond && need_null) {
      eps = cfg_epsilon(eps_fn(x, t, y), eps_fn(x, t, nulls), cfg.guidance);
    } else {
      eps = need_cond ? eps_fn(x, t, y) : eps_fn(x, t, nulls);
    }
    const double ab = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t_prev);
    const double sa = std::sqrt(ab), sn = std::sqrt(1.0 - ab);
    const double sa_prev = std::sqrt(ab_prev), sn_prev = std::sqrt(1.0 - ab_prev);
    std::vector<double> next(x.size());
    auto xv = x.values();
    auto ev = eps.values();
    for (std::size_t k = 0; k < next.size(); ++k) {
      const double x0_hat = (xv[k] - sn * ev[k]) / sa;
      next[k] = sa_prev * x0_hat + sn_prev * ev[k];
    }
    x = Tensor::from(x.shape(), std::move(next));
  }
  return x;
}

Tensor initial_noise(std::size_t count, std::size_t channels, std::size_t length, std::uint64_t seed) {
  std::vector<double> v;
  v.reserve(count * channels * length);
  for (std::size_t i = 0; i < count; ++i) {
    nn::Rng rng(mix_seed(seed, i));
    std::normal_distribution<double> d(0.0, 1.0);
    for (std::size_t k = 0; k < channels * length; ++k) v.push_back(d(rng));
  }
  return Tensor::from({count, channels, length}, std::move(v));
}

Tensor sample(const UNet1D& net, int label, std::size_t count, std::size_t length, const SamplerConfig& cfg,
              const BetaSchedule& sched, std::uint64_t seed, std::size_t batch) {
  require(label >= 0 && static_cast<std::size_t>(label) < net.config().classes, ErrorKind::invalid_argument,
          "class index " + std::to_string(label) + " out of range (K=" + std::to_string(net.config().classes) + ")");
  require(batch >= 1, ErrorKind::invalid_argument, "sampling batch must be >= 1");
  const std::size_t c = net.config().channels;
  const Tensor noise = initial_noise(count, c, length, seed);
  const EpsFn eps = [&net](const Tensor& x, std::size_t t, std::span<const int> y) {
    const std::vector<std::size_t> ts(y.size(), t);
    return net.forward(x, ts, y);
  };
  std::vector<double> out;
  out.reserve(noise.size());
  const std::size_t per = c * length;
  for (std::size_t start = 0; start < count; start += batch) {
    const std::size_t nb = std::min(batch, count - start);
    std::vector<double> chunk(noise.values().begin() + start * per, noise.values().begin() + (start + nb) * per);
    const std::vector<int> y(nb, label);
    const Tensor x = ddim_sample(eps, Tensor::from({nb, c, length}, std::move(chunk)), y,
                                 static_cast<int>(net.null_label()), cfg, sched);
    out.insert(out.end(), x.values().begin(), x.values().end());
  }
  return Tensor::from({count, c, length}, std::move(out));
}

// ------------------------------------------------------------------ training

double ema_decay_at(double decay, std::size_t n, bool warmup) {
  if (!warmup) return decay;
  const double ramp = (1.0 + static_cast<double>(n)) / (10.0 + static_cast<double>(n));
  return std::min(decay, ramp);
}

std::string unet_config_json(const UNetConfig& c) {
  return json{{"channels", c.channels}, {"classes", c.classes},   {"widths", c.widths},
              {"embed_dim", c.embed_dim}, {"groups", c.groups}}
      .dump();
}

namespace {

UNetConfig unet_config_from(const json& j) {
  UNetConfig c;
  c.channels = j.at("channels").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.widths = j.at("widths").get<std::vector<std::size_t>>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.groups = j.at("groups").get<std::size_t>();
  return c;
}

json train_config_json(const DiffusionTrainConfig& c) {
  return {{"lr", c.lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"weight_decay", c.weight_decay},
          {"label_dropout", c.label_dropout},
          {"batch", c.batch},
          {"epochs", c.epochs},
          {"max_steps", c.max_steps},
          {"patience", c.patience},
          {"smooth_window", c.smooth_window},
          {"ema_decay", c.ema_decay},
          {"ema_warmup", c.ema_warmup},
          {"seed", c.seed}};
}

}  // namespace

TrainResult train(const WindowBank& bank, const UNetConfig& ucfg, const BetaSchedule& sched,
                  const DiffusionTrainConfig& cfg) {
  require(cfg.label_dropout >= 0.0 && cfg.label_dropout <= 1.0, ErrorKind::config,
          "label_dropout must lie in [0, 1]");
  require(cfg.ema_decay >= 0.0 && cfg.ema_decay < 1.0, ErrorKind::config, "ema_decay must lie in [0, 1)");
  require(cfg.batch >= 1, ErrorKind::config, "batch must be >= 1");
  require(bank.channels() == ucfg.channels, ErrorKind::config, "training windows do not match the U-Net channels");

  UNet1D net(ucfg, mix_seed(cfg.seed, 1));
  nn::Rng rng(mix_seed(cfg.seed, 2));
  nn::Adam opt(net.params(), {cfg.lr, cfg.beta1, cfg.beta2, 1e-8, cfg.weight_decay, true});
  net.params().init_ema();

  const std::size_t per_epoch = (bank.size() + cfg.batch - 1) / cfg.batch;
  const std::size_t total = cfg.max_steps > 0 ? cfg.max_steps : cfg.epochs * per_epoch;

  TrainResult result;
  MovingAverage smooth(std::max<std::size_t>(cfg.smooth_window, 1));
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_live, best_ema;

  std::vector<int> y;
  for (std::size_t step = 1; step <= total; ++step) {
    const auto idx = draw_indices(bank.size(), cfg.batch, rng);
    const Tensor x0 = gather(bank, idx, &y);

    // Draws are made explicitly so the EMA weights can be scored on the same noise.
    std::uniform_int_distribution<std::size_t> pick_t(1, sched.steps());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::size_t> t(y.size());
    for (std::size_t b = 0; b < y.size(); ++b) {
      t[b] = pick_t(rng);
      if (unif(rng) < cfg.label_dropout) y[b] = static_cast<int>(net.null_label());
    }
    const Tensor eps = nn::randn(x0.shape(), rng);

    LogRow row;
    row.step = step;
    if (cfg.track_ema_loss) {
      ad::NoGradGuard no_grad;
      const auto live = net.params().snapshot();
      net.params().load(net.params().ema());
      row.ema_loss = denoise_loss_with(net, x0, t, y, eps, sched).item();
      net.params().load(live);
    }

    net.params().zero_grad();
    const Tensor loss = denoise_loss_with(net, x0, t, y, eps, sched);
    row.loss = loss.item();
    if (!std::isfinite(row.loss)) {
      std::ostringstream msg;
      msg << "non-finite denoising loss at step " << step << " (lr=" << cfg.lr
          << ", grad norm=" << net.params().grad_norm() << ")";
      fail(ErrorKind::numeric, msg.str());
    }
    ad::backward(loss);
    const double gnorm = net.params().grad_norm();
    if (!std::isfinite(gnorm)) {
      std::ostringstream msg;
      msg << "non-finite gradient at step " << step << " (lr=" << cfg.lr << ", loss=" << row.loss << ")";
      fail(ErrorKind::numeric, msg.str());
    }
    opt.step();
    net.params().ema_update(ema_decay_at(cfg.ema_decay, step - 1, cfg.ema_warmup));
    result.log.push_back(row);

    const double s = smooth.push(row.loss);
    if (s < best) {
      best = s;
      result.best_step = step;
      best_live = net.params().snapshot();
      best_ema = net.params().ema();
    }
    if (cfg.patience > 0 && step - result.best_step >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.best_metric = best;

  json meta{{"model", "ddpm"},
            {"unet", json::parse(unet_config_json(ucfg))},
            {"schedule", {{"steps", sched.steps()}, {"beta_first", sched.beta_first()}, {"beta_last", sched.beta_last()}}},
            {"prediction", "epsilon"},
            {"length", bank.length()},
            {"train", train_config_json(cfg)},
            {"normalization", "zscore_recording"}};

  result.last.kind = "ddpm";
  result.last.step = result.log.empty() ? 0 : result.log.back().step;
  meta["selected"] = "last";
  result.last.meta_json = meta.dump();
  result.last.groups.push_back(params_group("unet", net.params()));
  result.last.groups.push_back(ema_group("unet.ema", net.params()));
  for (auto& g : optimizer_groups("unet.adamw", net.params(), opt)) result.last.groups.push_back(std::move(g));

  if (best_live.empty()) {
    best_live = net.params().snapshot();
    best_ema = net.params().ema();
  }
  result.best.kind = "ddpm";
  result.best.step = result.best_step;
  meta["selected"] = "best";
  meta["best_metric"] = best;
  result.best.meta_json = meta.dump();
  result.best.groups.push_back(values_group("unet", net.params(), best_live));
  result.best.groups.push_back(values_group("unet.ema", net.params(), best_ema));
  return result;
}

std::string log_to_csv(const std::vector<LogRow>& log, bool with_ema) {
  std::ostringstream out;
  out.precision(17);
  out << (with_ema ? "step,loss,ema_loss\n" : "step,loss\n");
  for (const auto& r : log) {
    out << r.step << ',' << r.loss;
    if (with_ema) out << ',' << r.ema_loss;
    out << '\n';
  }
  return out.str();
}

LoadedModel load_model(const Checkpoint& ck, bool live) {
  require(ck.kind == "ddpm", ErrorKind::format, "checkpoint is a '" + ck.kind + "' model, expected ddpm");
  json meta;
  try {
    meta = json::parse(ck.meta_json);
    const auto& s = meta.at("schedule");
    LoadedModel m{UNet1D(unet_config_from(meta.at("unet")), 0),
                  BetaSchedule(s.at("steps").get<std::size_t>(), s.at("beta_first").get<double>(),
                               s.at("beta_last").get<double>()),
                  meta.at("length").get<std::size_t>()};
    if (!live && ck.has_group("unet.ema")) {
      load_params(ck.group("unet.ema"), m.net.params());
    } else {
      load_params(ck.group("unet"), m.net.params());
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("checkpoint metadata: ") + e.what());
  }
}

}  // namespace artifactgen::diffusion
