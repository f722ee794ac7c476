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

#include "artifactgen/wgan.hpp"

#include "artifactgen/error.hpp"
#include "artifactgen/hash.hpp"
#include "artifactgen/signal.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace artifactgen::gan {

using nlohmann::json;
namespace ad = artifactgen::ad;

namespace {

constexpr double kSlope = 0.2;
constexpr std::size_t kKernel = 9;

Tensor lrelu(const Tensor& x) { return ad::leaky_relu(x, kSlope); }

}  // namespace

// ------------------------------------------------------------------ generator

Generator::Generator(GeneratorConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  require(cfg_.widths.size() == 4, ErrorKind::config, "generator: expected 4 widths");
  require(cfg_.length >= 10 && cfg_.length % 10 == 0, ErrorKind::config,
          "generator: window length must be a multiple of 10, got " + std::to_string(cfg_.length));
  require(cfg_.classes > 0 && cfg_.channels > 0 && cfg_.latent_dim > 0, ErrorKind::config,
          "generator: classes, channels and latent_dim must be positive");
  nn::Rng rng(seed);
  const auto& w = cfg_.widths;
  seed_ = nn::make_linear(params_, "seed", cfg_.latent_dim + cfg_.classes, w[0] * (cfg_.length / 10), rng);
  up1_ = nn::make_conv_transpose1d(params_, "up1", w[0], w[1], kKernel, 5, 2, 0, rng);
  up2_ = nn::make_conv_transpose1d(params_, "up2", w[1], w[2], kKernel, 2, 4, 1, rng);
  refine_ = nn::make_conv1d(params_, "refine", w[2], w[3], kKernel, 1, 4, rng);
  out_ = nn::make_conv1d(params_, "out", w[3], cfg_.channels, kKernel, 1, 4, rng);
}

Tensor Generator::forward(const Tensor& z, std::span<const int> y) const {
  require(z.rank() == 2 && z.dim(1) == cfg_.latent_dim && z.dim(0) == y.size(), ErrorKind::invalid_argument,
          "generator: latent batch " + ad::shape_str(z.shape()) + " does not match labels");
  const std::size_t nb = z.dim(0);
  Tensor h = ad::concat({z, nn::one_hot(y, cfg_.classes)}, 1);
  h = lrelu(ad::reshape(seed_(h), {nb, cfg_.widths[0], cfg_.length / 10}));
  h = lrelu(up1_(h));
  h = lrelu(up2_(h));
  h = lrelu(refine_(h));
  return ad::tanh(out_(h));
}

// ------------------------------------------------------------------ critic

ProjectionCritic::ProjectionCritic(CriticConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  if (cfg_.norm == CriticNorm::group_norm) {
    fail(ErrorKind::invalid_argument,
         "critic: group_norm has a first-order-only backward and cannot be used under a gradient penalty");
  }
  require(cfg_.widths.size() == 4, ErrorKind::config, "critic: expected 4 widths");
  const std::size_t strides[] = {1, 2, 5, 1};
  const std::size_t pads[] = {4, 4, 2, 4};
  std::size_t len = cfg_.length;
  std::size_t in = cfg_.channels;
  nn::Rng rng(seed);
  for (std::size_t i = 0; i < 4; ++i) {
    require(len + 2 * pads[i] >= kKernel, ErrorKind::config, "critic: window too short for the conv stack");
    convs_.push_back(
        nn::make_conv1d(params_, "conv" + std::to_string(i), in, cfg_.widths[i], kKernel, strides[i], pads[i], rng));
    len = nn::conv_length(len, strides[i], kKernel, pads[i]);
    in = cfg_.widths[i];
  }
  head_ = nn::make_linear(params_, "head", in, 1, rng, false);
  embed_ = nn::make_embedding(params_, "class_embedding", cfg_.classes, in, rng, 1.0 / std::sqrt(double(in)));
}

Tensor ProjectionCritic::features(const Tensor& x) const {
  require(x.rank() == 3 && x.dim(1) == cfg_.channels && x.dim(2) == cfg_.length, ErrorKind::invalid_argument,
          "critic: expected [B," + std::to_string(cfg_.channels) + "," + std::to_string(cfg_.length) + "], got " +
              ad::shape_str(x.shape()));
  Tensor h = x;
  for (const auto& c : convs_) h = lrelu(c(h));
  return nn::global_avg_pool1d(h);
}

std::pair<Tensor, Tensor> ProjectionCritic::score_terms(const Tensor& x, std::span<const int> y) const {
  require(x.dim(0) == y.size(), ErrorKind::invalid_argument, "critic: batch and label counts differ");
  const Tensor phi = features(x);
  const std::size_t nb = x.dim(0);
  const Tensor linear = ad::reshape(head_(phi), {nb});
  const Tensor proj = ad::reshape(ad::sum_to(ad::mul(phi, embed_(y)), {nb, 1}), {nb});
  return {linear, proj};
}

Tensor ProjectionCritic::score(const Tensor& x, std::span<const int> y) const {
  auto [linear, proj] = score_terms(x, y);
  return ad::add(linear, proj);
}

// ------------------------------------------------------------------ losses

Tensor gradient_penalty_at(const CriticFn& critic, const Tensor& x_hat_in, std::span<const int> y, double lambda,
                           std::vector<double>* grad_norms) {
  require(lambda >= 0.0, ErrorKind::invalid_argument, "gradient penalty: lambda must be >= 0");
  Tensor x_hat = x_hat_in.detach();
  x_hat.set_requires_grad(true);
  const Tensor scores = critic(x_hat, y);
  const std::size_t nb = x_hat.dim(0);
  require(scores.size() == nb, ErrorKind::invalid_argument, "gradient penalty: critic must return one score per row");
  // Rows are independent, so the gradient of the summed score holds each row's own input gradient.
  const Tensor g = ad::grad(ad::sum(scores), {x_hat}, /*create_graph=*/true)[0];
  ad::Shape reduce(g.rank(), 1);
  reduce[0] = nb;
  const Tensor sq = ad::reshape(ad::sum_to(ad::square(g), reduce), {nb});
  const Tensor norm = ad::sqrt(ad::add_scalar(sq, 1e-12));
  if (grad_norms) grad_norms->assign(norm.values().begin(), norm.values().end());
  return ad::scale(ad::mean(ad::square(ad::add_scalar(norm, -1.0))), lambda);
}

Tensor gradient_penalty(const CriticFn& critic, const Tensor& real, const Tensor& fake, std::span<const int> y,
                        double lambda, nn::Rng& rng, std::vector<double>* grad_norms) {
  require(real.shape() == fake.shape(), ErrorKind::invalid_argument,
          "gradient penalty: real " + ad::shape_str(real.shape()) + " vs fake " + ad::shape_str(fake.shape()));
  const std::size_t nb = real.dim(0);
  const std::size_t per = real.size() / nb;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> mix(real.size());
  auto rv = real.values();
  auto fv = fake.values();
  for (std::size_t b = 0; b < nb; ++b) {
    const double a = unif(rng);
    for (std::size_t i = 0; i < per; ++i) mix[b * per + i] = a * rv[b * per + i] + (1.0 - a) * fv[b * per + i];
  }
  return gradient_penalty_at(critic, Tensor::from(real.shape(), std::move(mix)), y, lambda, grad_norms);
}

Tensor stft_magnitude_tensor(const Tensor& x, const SpectralLossConfig& cfg) {
  require(x.rank() == 3 && cfg.nfft <= x.dim(2) && cfg.hop >= 1, ErrorKind::invalid_argument,
          "spectral loss: nfft must not exceed the window length");
  const std::size_t bins = cfg.nfft / 2 + 1;
  const std::vector<double> taper = signal::hann(cfg.nfft);
  std::vector<double> kernel(2 * bins * cfg.nfft);
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t n = 0; n < cfg.nfft; ++n) {
      const double ph = 2.0 * std::numbers::pi * static_cast<double>(k * n) / static_cast<double>(cfg.nfft);
      kernel[k * cfg.nfft + n] = taper[n] * std::cos(ph);
      kernel[(bins + k) * cfg.nfft + n] = -taper[n] * std::sin(ph);
    }
  }
  const Tensor basis = Tensor::from({2 * bins, 1, cfg.nfft}, std::move(kernel));
  const Tensor flat = ad::reshape(x, {x.dim(0) * x.dim(1), 1, x.dim(2)});
  const Tensor spec = ad::conv1d(flat, basis, cfg.hop, 0);
  const Tensor re = ad::narrow(spec, 1, 0, bins);
  const Tensor im = ad::narrow(spec, 1, bins, bins);
  return ad::sqrt(ad::add_scalar(ad::add(ad::square(re), ad::square(im)), 1e-12));
}

Tensor spectral_l1(const Tensor& real, const Tensor& fake, const SpectralLossConfig& cfg) {
  require(real.shape() == fake.shape(), ErrorKind::invalid_argument, "spectral loss: shapes differ");
  return ad::mean(ad::abs(ad::sub(stft_magnitude_tensor(real, cfg), stft_magnitude_tensor(fake, cfg))));
}

// ------------------------------------------------------------------ config json

std::string generator_config_json(const GeneratorConfig& c) {
  return json{{"latent_dim", c.latent_dim}, {"classes", c.classes}, {"channels", c.channels},
              {"length", c.length},         {"widths", c.widths}}
      .dump();
}

std::string critic_config_json(const CriticConfig& c) {
  return json{{"classes", c.classes},
              {"channels", c.channels},
              {"length", c.length},
              {"widths", c.widths},
              {"norm", c.norm == CriticNorm::none ? "none" : "group_norm"}}
      .dump();
}

namespace {

GeneratorConfig generator_config_from(const json& j) {
  GeneratorConfig c;
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.channels = j.at("channels").get<std::size_t>();
  c.length = j.at("length").get<std::size_t>();
  c.widths = j.at("widths").get<std::vector<std::size_t>>();
  return c;
}

CriticConfig critic_config_from(const json& j) {
  CriticConfig c;
  c.classes = j.at("classes").get<std::size_t>();
  c.channels = j.at("channels").get<std::size_t>();
  c.length = j.at("length").get<std::size_t>();
  c.widths = j.at("widths").get<std::vector<std::size_t>>();
  c.norm = j.value("norm", std::string("none")) == "group_norm" ? CriticNorm::group_norm : CriticNorm::none;
  return c;
}

json train_config_json(const TrainConfig& c) {
  return {{"lambda_gp", c.lambda_gp}, {"n_critic", c.n_critic},   {"batch", c.batch},
          {"lr", c.lr},               {"beta1", c.beta1},         {"beta2", c.beta2},
          {"spectral_weight", c.spectral_weight},                 {"spectral_nfft", c.spectral.nfft},
          {"spectral_hop", c.spectral.hop},                       {"epochs", c.epochs},
          {"max_steps", c.max_steps}, {"patience", c.patience},   {"smooth_window", c.smooth_window},
          {"seed", c.seed}};
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

// ------------------------------------------------------------------ training

TrainResult train(const WindowBank& bank, const GeneratorConfig& gcfg, const CriticConfig& dcfg,
                  const TrainConfig& cfg) {
  require(cfg.n_critic >= 1, ErrorKind::config, "n_critic must be >= 1");
  require(cfg.lambda_gp >= 0.0, ErrorKind::config, "lambda_gp must be >= 0");
  require(cfg.batch >= 1, ErrorKind::config, "batch must be >= 1");
  require(bank.channels() == gcfg.channels && bank.length() == gcfg.length, ErrorKind::config,
          "training windows do not match the generator output shape");

  Generator gen(gcfg, mix_seed(cfg.seed, 1));
  ProjectionCritic critic(dcfg, mix_seed(cfg.seed, 2));
  nn::Rng rng(mix_seed(cfg.seed, 3));
  nn::Adam opt_g(gen.params(), {cfg.lr, cfg.beta1, cfg.beta2, 1e-8, 0.0, false});
  nn::Adam opt_d(critic.params(), {cfg.lr, cfg.beta1, cfg.beta2, 1e-8, 0.0, false});
  const CriticFn critic_fn = [&critic](const Tensor& x, std::span<const int> y) { return critic.score(x, y); };

  const std::size_t per_epoch = (bank.size() + cfg.batch - 1) / cfg.batch;
  const std::size_t total = cfg.max_steps > 0 ? cfg.max_steps : cfg.epochs * per_epoch;

  TrainResult result;
  MovingAverage smooth(std::max<std::size_t>(cfg.smooth_window, 1));
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_g, best_d;

  auto abort_numeric = [&](std::size_t step, const std::string& what) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at step " << step << " (lr=" << cfg.lr
        << ", critic grad norm=" << critic.params().grad_norm()
        << ", generator grad norm=" << gen.params().grad_norm() << ")";
    fail(ErrorKind::numeric, msg.str());
  };

  std::vector<int> y;
  for (std::size_t step = 1; step <= total; ++step) {
    LogRow row;
    row.step = step;
    for (std::size_t c = 0; c < cfg.n_critic; ++c) {
      const auto idx = draw_indices(bank.size(), cfg.batch, rng);
      const Tensor real = gather(bank, idx, &y);
      const Tensor z = nn::randn({cfg.batch, gcfg.latent_dim}, rng);
      Tensor fake;
      {
        ad::NoGradGuard no_grad;
        fake = gen.forward(z, y);
      }
      critic.params().zero_grad();
      const Tensor d_real = ad::mean(critic.score(real, y));
      const Tensor d_fake = ad::mean(critic.score(fake, y));
      const Tensor gp = gradient_penalty(critic_fn, real, fake, y, cfg.lambda_gp, rng);
      const Tensor d_loss = ad::add(ad::sub(d_fake, d_real), gp);
      row.d_loss = d_loss.item();
      row.gp = gp.item();
      if (!finite(row.d_loss)) abort_numeric(step, "critic loss");
      ad::backward(d_loss);
      opt_d.step();
    }

    const auto idx = draw_indices(bank.size(), cfg.batch, rng);
    const Tensor real = gather(bank, idx, &y);
    const Tensor z = nn::randn({cfg.batch, gcfg.latent_dim}, rng);
    for (auto& p : critic.params().tensors()) Tensor(p).set_requires_grad(false);
    gen.params().zero_grad();
    const Tensor fake = gen.forward(z, y);
    Tensor g_loss = ad::neg(ad::mean(critic.score(fake, y)));
    if (cfg.spectral_weight > 0.0) {
      const Tensor spec = spectral_l1(real, fake, cfg.spectral);
      row.spectral = spec.item();
      g_loss = ad::add(g_loss, ad::scale(spec, cfg.spectral_weight));
    }
    row.g_loss = g_loss.item();
    if (!finite(row.g_loss)) abort_numeric(step, "generator loss");
    ad::backward(g_loss);
    for (auto& p : critic.params().tensors()) Tensor(p).set_requires_grad(true);
    opt_g.step();
    result.log.push_back(row);

    const double s = smooth.push(std::fabs(row.g_loss));
    if (s < best) {
      best = s;
      result.best_step = step;
      best_g = gen.params().snapshot();
      best_d = critic.params().snapshot();
    }
    if (cfg.patience > 0 && step - result.best_step >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.best_metric = best;

  json meta{{"model", "gan"},
            {"generator", json::parse(generator_config_json(gcfg))},
            {"critic", json::parse(critic_config_json(dcfg))},
            {"train", train_config_json(cfg)},
            {"normalization", "minmax_window"}};
  const std::uint64_t last_step = result.log.empty() ? 0 : result.log.back().step;

  result.last.kind = "gan";
  result.last.step = last_step;
  meta["selected"] = "last";
  result.last.meta_json = meta.dump();
  result.last.groups.push_back(params_group("generator", gen.params()));
  result.last.groups.push_back(params_group("critic", critic.params()));
  for (auto& g : optimizer_groups("generator.adam", gen.params(), opt_g)) result.last.groups.push_back(std::move(g));
  for (auto& g : optimizer_groups("critic.adam", critic.params(), opt_d)) result.last.groups.push_back(std::move(g));

  result.best.kind = "gan";
  result.best.step = result.best_step;
  meta["selected"] = "best";
  meta["best_metric"] = best;
  result.best.meta_json = meta.dump();
  if (best_g.empty()) {
    best_g = gen.params().snapshot();
    best_d = critic.params().snapshot();
  }
  result.best.groups.push_back(values_group("generator", gen.params(), best_g));
  result.best.groups.push_back(values_group("critic", critic.params(), best_d));
  return result;
}

std::string log_to_csv(const std::vector<LogRow>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "step,d_loss,g_loss,gp,spectral\n";
  for (const auto& r : log) out << r.step << ',' << r.d_loss << ',' << r.g_loss << ',' << r.gp << ',' << r.spectral << '\n';
  return out.str();
}

Generator load_generator(const Checkpoint& ck) {
  require(ck.kind == "gan", ErrorKind::format, "checkpoint is a '" + ck.kind + "' model, expected gan");
  try {
    Generator g(generator_config_from(json::parse(ck.meta_json).at("generator")), 0);
    load_params(ck.group("generator"), g.params());
    return g;
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("checkpoint metadata: ") + e.what());
  }
}

ProjectionCritic load_critic(const Checkpoint& ck) {
  require(ck.kind == "gan", ErrorKind::format, "checkpoint is a '" + ck.kind + "' model, expected gan");
  try {
    ProjectionCritic d(critic_config_from(json::parse(ck.meta_json).at("critic")), 0);
    load_params(ck.group("critic"), d.params());
    return d;
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("checkpoint metadata: ") + e.what());
  }
}

Tensor sample(const Generator& g, int label, std::size_t count, std::uint64_t seed, std::size_t batch) {
  require(label >= 0 && static_cast<std::size_t>(label) < g.config().classes, ErrorKind::invalid_argument,
          "class index " + std::to_string(label) + " out of range (K=" + std::to_string(g.config().classes) + ")");
  ad::NoGradGuard no_grad;
  const auto& c = g.config();
  std::vector<double> out;
  out.reserve(count * c.channels * c.length);
  for (std::size_t start = 0; start < count; start += batch) {
    const std::size_t nb = std::min(batch, count - start);
    std::vector<double> z;
    z.reserve(nb * c.latent_dim);
    for (std::size_t i = 0; i < nb; ++i) {
      nn::Rng rng(mix_seed(seed, start + i));
      std::normal_distribution<double> d(0.0, 1.0);
      for (std::size_t k = 0; k < c.latent_dim; ++k) z.push_back(d(rng));
    }
    const std::vector<int> y(nb, label);
    const Tensor x = g.forward(Tensor::from({nb, c.latent_dim}, std::move(z)), y);
    out.insert(out.end(), x.values().begin(), x.values().end());
  }
  return Tensor::from({count, c.channels, c.length}, std::move(out));
}

}  // namespace artifactgen::gan
