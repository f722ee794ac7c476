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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any failed.
//
//   acceptance [--only 1,4,9] [--configs DIR] [--work DIR]

#include "artifactgen/autodiff.hpp"
#include "artifactgen/commands.hpp"
#include "artifactgen/config.hpp"
#include "artifactgen/dataset.hpp"
#include "artifactgen/ddpm.hpp"
#include "artifactgen/metrics.hpp"
#include "artifactgen/nn.hpp"
#include "artifactgen/signal.hpp"
#include "artifactgen/synth.hpp"
#include "artifactgen/training.hpp"
#include "artifactgen/wgan.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace artifactgen;
namespace fs = std::filesystem;
using ad::Tensor;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "!! ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
  fs::path configs;
  fs::path work;
  std::vector<std::string> models = {"gan", "ddpm"};
};

// ---------------------------------------------------------------- 1

Outcome windowing(const Context&) {
  Outcome o;
  std::mt19937_64 rng(1);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t T = std::uniform_int_distribution<std::size_t>(1, 20000)(rng);
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, 2000)(rng);
    const double rho = std::uniform_real_distribution<double>(0.0, 0.95)(rng);
    const std::size_t s = data::stride(L, rho);
    std::size_t brute = 0;
    for (std::size_t start = 0; start + L <= T; start += s) ++brute;
    if (data::window_count(T, L, s) != brute) ++mismatches;
  }
  const double dt = seconds_since(t0);
  o.check(mismatches == 0, fmt("%zu/1000 triples disagree with start enumeration", mismatches));
  o.check(dt < 1.0, fmt("%.3f s (limit 1 s)", dt));
  return o;
}

// ---------------------------------------------------------------- 2

Outcome normalization(const Context&) {
  Outcome o;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    data::Window w;
    w.data = Matrix(8, 250);
    const double gain = std::exp(nd(rng) * 3.0), offset = nd(rng) * 100.0;
    for (double& v : w.data.data) v = offset + gain * nd(rng);
    const Matrix orig = w.data;
    data::minmax_normalize(w);
    data::minmax_denormalize(w);
    double scale = 0.0;
    for (double v : orig.data) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < orig.data.size(); ++k)
      worst = std::max(worst, std::abs(w.data.data[k] - orig.data[k]) / scale);
  }
  o.check(worst < 1e-5, fmt("min-max round trip max relative error %.2e (limit 1e-5)", worst));

  data::Recording rec;
  rec.id = "r";
  rec.subject_id = "s";
  rec.channel_names = {"a", "b", "c"};
  rec.data = Matrix(3, 5000);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < 5000; ++t) rec.data(c, t) = 40.0 * (c + 1) + 17.0 * nd(rng);
  for (std::size_t t = 0; t < 5000; ++t) rec.data(2, t) = 3.25;  // constant channel
  const auto z = data::zscore_normalize(rec);
  double worst_mean = 0.0, worst_std = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0.0, s2 = 0.0;
    for (double v : z.data.row(c)) m += v;
    m /= 5000.0;
    for (double v : z.data.row(c)) s2 += (v - m) * (v - m);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_std = std::max(worst_std, std::abs(std::sqrt(s2 / 5000.0) - 1.0));
  }
  o.check(worst_mean < 1e-9, fmt("z-score |mean| %.2e (limit 1e-9)", worst_mean));
  o.check(worst_std < 1e-6, fmt("z-score |std-1| %.2e (limit 1e-6)", worst_std));
  bool const_ok = z.norm.degenerate;
  for (double v : z.data.row(2)) const_ok = const_ok && v == 0.0;
  o.check(const_ok, "constant channel z-scores to finite zeros and is flagged");

  data::Window flat;
  flat.data = Matrix(2, 10, 7.0);
  data::minmax_normalize(flat);
  bool flat_ok = flat.norm.degenerate;
  for (double v : flat.data.data) flat_ok = flat_ok && std::isfinite(v) && std::abs(v + 1.0) < 1e-12;
  data::minmax_denormalize(flat);
  for (double v : flat.data.data) flat_ok = flat_ok && std::abs(v - 7.0) < 1e-6;
  o.check(flat_ok, "constant window min-max maps to -1 (finite, flagged) and restores within 1e-6");
  return o;
}

// ---------------------------------------------------------------- 3

Outcome gradients(const Context&) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  nn::Rng rng(3);
  double worst_layer = 0.0;
  std::string worst_name;
  auto layer = [&](const std::string& name, const std::function<Tensor()>& f, const std::vector<Tensor>& leaves) {
    for (const auto& leaf : leaves) {
      const double e = testing::gradcheck(f, leaf);
      if (e > worst_layer) {
        worst_layer = e;
        worst_name = name;
      }
    }
  };

  // single layers and three-layer stacks
  {
    nn::ModelParams p;
    auto lin = nn::make_linear(p, "lin", 6, 4, rng);
    auto x = testing::random_tensor({3, 6}, 11);
    layer("linear", [&] { return ad::sum(ad::square(lin(x))); }, {x, lin.weight, lin.bias});
  }
  {
    nn::ModelParams p;
    auto conv = nn::make_conv1d(p, "conv", 3, 4, 5, 2, 2, rng);
    auto x = testing::random_tensor({2, 3, 13}, 12);
    layer("conv1d", [&] { return ad::sum(ad::square(conv(x))); }, {x, conv.weight, conv.bias});
  }
  {
    nn::ModelParams p;
    auto up = nn::make_conv_transpose1d(p, "up", 3, 2, 4, 2, 1, 0, rng);
    auto x = testing::random_tensor({2, 3, 7}, 13);
    layer("conv_transpose1d", [&] { return ad::sum(ad::square(up(x))); }, {x, up.weight, up.bias});
  }
  {
    nn::ModelParams p;
    auto gn = nn::make_group_norm(p, "gn", 2, 4);
    auto x = testing::random_tensor({2, 4, 9}, 14);
    auto g = testing::random_tensor({4}, 15);
    auto b = testing::random_tensor({4}, 16);
    auto probe = testing::random_tensor({2, 4, 9}, 17, 1.0, false);
    layer("group_norm", [&] { return ad::sum(ad::mul(ad::group_norm(x, 2, g, b), probe)); }, {x, g, b});
  }
  {
    nn::ModelParams p;
    auto emb = nn::make_embedding(p, "emb", 4, 3, rng);
    const std::vector<int> idx = {0, 3, 3, 1};
    layer("embedding", [&] { return ad::sum(ad::square(emb(idx))); }, {emb.table});
  }
  {
    auto h = testing::random_tensor({2, 3, 6}, 18);
    auto g = testing::random_tensor({2, 3}, 19);
    auto b = testing::random_tensor({2, 3}, 20);
    layer("film", [&] { return ad::sum(ad::square(nn::film(h, g, b))); }, {h, g, b});
  }
  {
    auto x = testing::random_tensor({4, 5}, 21);
    layer("activations", [&] {
      return ad::sum(ad::add(ad::add(ad::tanh(x), ad::silu(x)), ad::square(ad::leaky_relu(x, 0.2))));
    }, {x});
  }
  {
    nn::ModelParams p;
    auto c1 = nn::make_conv1d(p, "c1", 2, 4, 3, 1, 1, rng);
    auto c2 = nn::make_conv1d(p, "c2", 4, 4, 4, 2, 1, rng);
    auto l3 = nn::make_linear(p, "l3", 4, 1, rng);
    auto x = testing::random_tensor({3, 2, 10}, 22);
    auto f = [&] {
      auto h = ad::leaky_relu(c1(x), 0.2);
      h = ad::tanh(c2(h));
      return ad::sum(ad::square(l3(nn::global_avg_pool1d(h))));
    };
    std::vector<Tensor> leaves(p.tensors().begin(), p.tensors().end());
    leaves.push_back(x);
    layer("conv stack", f, leaves);
  }
  o.check(worst_layer < 1e-4, fmt("layers: worst relative error %.2e (%s), limit 1e-4", worst_layer,
                                  worst_name.c_str()));

  // training losses on miniature models
  gan::GeneratorConfig gc{.latent_dim = 4, .classes = 3, .channels = 2, .length = 20, .widths = {4, 4, 3, 3}};
  gan::CriticConfig dc{.classes = 3, .channels = 2, .length = 20, .widths = {2, 3, 3, 3}};
  gan::Generator g(gc, 31);
  gan::ProjectionCritic d(dc, 32);
  const std::vector<int> y = {0, 2};
  auto z = testing::random_tensor({2, 4}, 33, 1.0, false);
  auto real = testing::random_tensor({2, 2, 20}, 34, 0.5, false);
  auto critic_fn = [&](const Tensor& x, std::span<const int> yy) { return d.score(x, yy); };

  auto worst_over = [](const std::function<Tensor()>& f, const nn::ModelParams& p) {
    return testing::gradcheck(f, p.tensors());
  };
  const double e_gen = worst_over([&] { return ad::neg(ad::mean(d.score(g.forward(z, y), y))); }, g.params());
  o.check(e_gen < 1e-4, fmt("generator loss: %.2e (limit 1e-4)", e_gen));
  const Tensor fake = g.forward(z, y).detach();
  const double e_critic = worst_over(
      [&] { return ad::sub(ad::mean(d.score(fake, y)), ad::mean(d.score(real, y))); }, d.params());
  o.check(e_critic < 1e-4, fmt("critic Wasserstein loss: %.2e (limit 1e-4)", e_critic));
  auto mix = testing::random_tensor({2, 2, 20}, 35, 0.5, false);
  const double e_gp =
      worst_over([&] { return gan::gradient_penalty_at(critic_fn, mix, y, 10.0); }, d.params());
  o.check(e_gp < 1e-3, fmt("gradient penalty (double backprop): %.2e (limit 1e-3)", e_gp));
  auto fake_leaf = testing::random_tensor({2, 2, 20}, 36, 0.5);
  const double e_spec =
      testing::gradcheck([&] { return gan::spectral_l1(real, fake_leaf, {.nfft = 8, .hop = 4}); }, fake_leaf);
  o.check(e_spec < 1e-4, fmt("spectral L1 term: %.2e (limit 1e-4)", e_spec));

  diffusion::UNetConfig uc{.channels = 2, .classes = 3, .widths = {4, 4}, .embed_dim = 4, .groups = 2};
  diffusion::UNet1D net(uc, 37);
  diffusion::BetaSchedule sched(50);
  const std::vector<std::size_t> ts = {3, 41};
  const std::vector<int> yd = {1, 3};  // second row uses the null token
  auto x0 = testing::random_tensor({2, 2, 8}, 38, 1.0, false);
  auto eps = testing::random_tensor({2, 2, 8}, 39, 1.0, false);
  const double e_ddpm = worst_over([&] { return diffusion::denoise_loss_with(net, x0, ts, yd, eps, sched); },
                                   net.params());
  o.check(e_ddpm < 1e-4, fmt("denoising loss through the U-Net: %.2e (limit 1e-4)", e_ddpm));

  const double dt = seconds_since(t0);
  o.check(dt < 60.0, fmt("%.1f s (limit 60 s)", dt));
  return o;
}

// ---------------------------------------------------------------- 4

Outcome penalty_closed_form(const Context&) {
  Outcome o;
  auto v = testing::random_tensor({1, 2 * 16}, 4, 1.0, false);
  double n = 0.0;
  for (double a : v.values()) n += a * a;
  for (double& a : v.mutable_values()) a *= 2.0 / std::sqrt(n);
  auto critic = [&](const Tensor& x, std::span<const int>) {
    return ad::reshape(ad::matmul(ad::reshape(x, {x.dim(0), 32}), ad::transpose(v)), {x.dim(0)});
  };
  auto x = testing::random_tensor({6, 2, 16}, 5, 1.0, false);
  const std::vector<int> y(6, 0);
  std::vector<double> norms;
  const double gp = gan::gradient_penalty_at(critic, x, y, 10.0, &norms).item();
  o.check(std::abs(gp - 10.0) <= 1e-9, fmt("penalty %.12f, expected 10 within 1e-9", gp));
  double worst = 0.0;
  for (double g : norms) worst = std::max(worst, std::abs(g - 2.0));
  o.check(worst <= 1e-12, fmt("input-gradient norms equal ||v|| = 2 (max deviation %.1e)", worst));
  return o;
}

// ---------------------------------------------------------------- 5

Outcome projection_identity(const Context&) {
  Outcome o;
  gan::CriticConfig dc{.classes = 5, .channels = 8, .length = 250, .widths = {4, 8, 8, 8}};
  gan::ProjectionCritic d(dc, 5);
  // non-trivial class embedding and head
  std::mt19937_64 rng(55);
  std::normal_distribution<double> nd;
  for (double& v : d.embedding().mutable_values()) v = nd(rng);
  const auto w = d.head().values();
  const auto e = d.embedding().values();
  const std::size_t h = dc.widths.back();
  double worst = 0.0;
  const std::size_t total = 10000, batch = 500;
  ad::NoGradGuard ng;
  for (std::size_t start = 0; start < total; start += batch) {
    auto x = testing::random_tensor({batch, 8, 250}, 1000 + start, 1.0, false);
    std::vector<int> y(batch);
    for (auto& v : y) v = static_cast<int>(rng() % 5);
    const auto phi = d.features(x);
    const auto score = d.score(x, y);
    for (std::size_t b = 0; b < batch; ++b) {
      double lin = 0.0, proj = 0.0;
      for (std::size_t k = 0; k < h; ++k) {
        const double f = phi.at(b * h + k);
        lin += w[k] * f;
        proj += e[static_cast<std::size_t>(y[b]) * h + k] * f;
      }
      worst = std::max(worst, std::abs(score.at(b) - (lin + proj)) / std::max(1.0, std::abs(score.at(b))));
    }
  }
  o.check(worst <= 1e-12, fmt("max |D - (w.phi + <phi, e_y>)| = %.2e over 10k inputs (limit 1e-12)", worst));
  return o;
}

// ---------------------------------------------------------------- 6

Outcome forward_process(const Context&) {
  Outcome o;
  diffusion::BetaSchedule sched(1000);
  const std::size_t draws = 10000, d = 16;
  // x0 large enough that 5% of sqrt(ab_T) |x0| exceeds the Monte-Carlo error at t = T
  std::vector<double> x0v(d);
  for (std::size_t i = 0; i < d; ++i) x0v[i] = 100.0 * (i % 2 ? 1.0 : -1.0) * (1.0 + 0.1 * i);
  std::vector<double> rep(draws * d);
  for (std::size_t n = 0; n < draws; ++n) std::copy(x0v.begin(), x0v.end(), rep.begin() + n * d);
  const auto x0 = Tensor::from({draws, d}, rep);
  for (std::size_t t : {1, 10, 100, 500, 1000}) {
    const auto eps = testing::random_tensor({draws, d}, 600 + t, 1.0, false);
    const std::vector<std::size_t> tt(draws, t);
    const auto xt = diffusion::q_sample(x0, tt, eps, sched);
    const double ab = sched.alpha_bar(t);
    double err2 = 0.0, ref2 = 0.0, var_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double m = 0.0, s2 = 0.0;
      for (std::size_t n = 0; n < draws; ++n) m += xt.at(n * d + i);
      m /= draws;
      for (std::size_t n = 0; n < draws; ++n) s2 += (xt.at(n * d + i) - m) * (xt.at(n * d + i) - m);
      var_sum += s2 / (draws - 1);
      const double mu = std::sqrt(ab) * x0v[i];
      err2 += (m - mu) * (m - mu);
      ref2 += mu * mu;
    }
    const double mean_rel = std::sqrt(err2 / ref2);
    const double var_rel = std::abs(var_sum / d - (1.0 - ab)) / (1.0 - ab);
    o.check(mean_rel < 0.05 && var_rel < 0.05,
            fmt("t=%zu: mean rel err %.3f, variance rel err %.3f (limit 0.05)", t, mean_rel, var_rel));
  }
  return o;
}

// ---------------------------------------------------------------- 7

bool same_bytes(const Tensor& a, const Tensor& b) {
  return a.size() == b.size() && std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

Outcome guidance_identities(const Context&) {
  Outcome o;
  diffusion::UNetConfig uc{.channels = 4, .classes = 5, .widths = {8, 8}, .embed_dim = 8, .groups = 4};
  diffusion::UNet1D net(uc, 7);
  diffusion::BetaSchedule sched(100);
  auto eps = [&](const Tensor& x, std::size_t t, std::span<const int> y) {
    const std::vector<std::size_t> tt(x.dim(0), t);
    return net.forward(x, tt, y);
  };
  const auto noise = diffusion::initial_noise(3, 4, 40, 70);
  const std::vector<int> y = {0, 2, 4};
  const int null = static_cast<int>(net.null_label());
  auto run = [&](double w, bool cond_only, std::span<const int> labels) {
    ad::NoGradGuard ng;
    return diffusion::ddim_sample(eps, noise, labels, null, {.num_steps = 20, .guidance = w,
                                                              .conditional_only = cond_only},
                                  sched);
  };
  o.check(same_bytes(run(1.0, false, y), run(0.0, true, y)), "w=1 equals conditional-only sampling byte for byte");
  const std::vector<int> nulls(3, null);
  o.check(same_bytes(run(0.0, false, y), run(0.0, true, nulls)), "w=0 equals null-only sampling byte for byte");

  // exact-noise oracle, one DDIM step per training timestep
  diffusion::BetaSchedule full(1000);
  const auto x0 = testing::random_tensor({2, 3, 25}, 71, 1.0, false);
  auto oracle = [&](const Tensor& x, std::size_t t, std::span<const int>) {
    const double ab = full.alpha_bar(t);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (x.at(i) - std::sqrt(ab) * x0.at(i)) / std::sqrt(1.0 - ab);
    return Tensor::from(x.shape(), std::move(v));
  };
  const auto xT = diffusion::initial_noise(2, 3, 25, 72);
  const std::vector<int> y2 = {1, 2};
  const auto rec = diffusion::ddim_sample(oracle, xT, y2, 5, {.num_steps = 1000, .guidance = 1.5}, full);
  double worst = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) worst = std::max(worst, std::abs(rec.at(i) - x0.at(i)));
  o.check(worst <= 1e-3, fmt("oracle sampler reconstructs x0, max error %.2e (limit 1e-3)", worst));
  return o;
}

// ---------------------------------------------------------------- 8

metrics::WindowSet synthetic_set(const std::string& origin, std::size_t n_per_class, std::uint64_t seed) {
  synth::SynthConfig sc;
  sc.n_per_class = n_per_class;
  sc.seed = seed;
  auto windows = synth::generate_windows(sc);
  for (auto& w : windows) data::minmax_normalize(w);
  return metrics::make_set(origin, windows);
}

Outcome metric_nulls(const Context&) {
  Outcome o;
  const auto real = synthetic_set("real", 40, 8);
  metrics::EvalOptions opt;
  const auto rep = metrics::evaluate(real, {metrics::WindowSet{"copy", real.windows, real.labels}}, opt, &real, 5);
  const auto& m = rep.models.at(0);
  double worst = m.psd_l2;
  for (double v : m.rel_err) worst = std::max(worst, v);
  worst = std::max({worst, m.mean.mean_effect, m.cov_frob, m.acf_l2});
  o.check(real.size() == 200, fmt("n = %zu", real.size()));
  o.check(worst == 0.0, fmt("largest distance on identical sets: %.2e", worst));
  const double mmd = rep.pairs.at(0).value;
  o.check(mmd >= -0.02 && mmd <= 0.02, fmt("MMD %.5f in [-0.02, 0.02]", mmd));
  o.check(m.one_nn_acc >= 0.4 && m.one_nn_acc <= 0.6, fmt("1-NN accuracy %.3f in [0.4, 0.6]", m.one_nn_acc));

  // brute-force U-statistic on 50 vs 50
  const auto a = metrics::flatten(synthetic_set("a", 10, 81));
  const auto b = metrics::flatten(synthetic_set("b", 10, 82));
  const double sigma = 3.7;
  auto k = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    return std::exp(-s / (2.0 * sigma * sigma));
  };
  const double m_ = a.size(), n_ = b.size();
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) xx += k(a[i], a[j]);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j) yy += k(b[i], b[j]);
  for (const auto& u : a)
    for (const auto& v : b) xy += k(u, v);
  const double brute = xx / (m_ * (m_ - 1)) + yy / (n_ * (n_ - 1)) - 2.0 * xy / (m_ * n_);
  const double lib = metrics::mmd_unbiased(a, b, sigma);
  o.check(a.size() == 50 && std::abs(lib - brute) <= 1e-10,
          fmt("MMD %.12f vs brute force %.12f (limit 1e-10)", lib, brute));

  metrics::WindowSet pair;
  pair.origin = "pm";
  pair.windows.push_back(real.windows[3]);
  Matrix neg = real.windows[3];
  for (double& v : neg.data) v = -v;
  pair.windows.push_back(neg);
  pair.labels = {0, 0};
  const double div = metrics::diversity(pair).value;
  o.check(div == 2.0, fmt("diversity({w, -w}) = %.17g", div));
  return o;
}

// ---------------------------------------------------------------- 9

metrics::WindowSet load_dir(const std::string& origin, const fs::path& dir) {
  std::vector<data::Window> ws;
  for (const auto& f : commands::window_files(dir)) ws.push_back(data::read_window_file(f));
  return metrics::make_set(origin, ws);
}

metrics::WindowSet of_class(const metrics::WindowSet& s, int c) {
  metrics::WindowSet out{s.origin, {}, {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.labels[i] == c) {
      out.windows.push_back(s.windows[i]);
      out.labels.push_back(c);
    }
  return out;
}

metrics::WindowSet from_tensor(const std::string& origin, const Tensor& t, int label) {
  const std::vector<int> labels(t.dim(0), label);
  return metrics::make_set(origin, to_windows(t, labels));
}

void append(metrics::WindowSet& a, const metrics::WindowSet& b) {
  a.windows.insert(a.windows.end(), b.windows.begin(), b.windows.end());
  a.labels.insert(a.labels.end(), b.labels.begin(), b.labels.end());
}

Outcome toy_run(const Context& ctx) {
  Outcome o;
  for (const std::string& model : ctx.models) {
    const auto cfg = load_config(ctx.configs / ("toy_" + model + ".yaml"));
    const auto dir = ctx.work / ("toy_" + model);
    fs::remove_all(dir);
    const auto cur = commands::curate(cfg, {}, dir / "data");
    const auto t0 = std::chrono::steady_clock::now();
    const auto trained = commands::train(cfg, model, cur.manifest, dir / "model");
    const double train_s = seconds_since(t0);
    o.check(train_s <= 120.0, fmt("%s: %zu training steps in %.1f s (budget 120 s)", model.c_str(), trained.steps,
                                  train_s));

    const auto manifest = data::read_manifest(cur.manifest);
    const auto real = metrics::make_set("real", data::load_manifest_windows(cur.manifest, manifest, "test"));
    const std::size_t K = manifest.class_map.size();
    const auto ck = read_checkpoint(trained.model);
    metrics::WindowSet fake{"trained", {}, {}}, base{"untrained", {}, {}};
    for (int c = 0; c < static_cast<int>(K); ++c) {
      const std::size_t n = std::max<std::size_t>(of_class(real, c).size(), 20);
      commands::SampleOptions so;
      so.checkpoint = trained.model;
      so.label = c;
      so.count = n;
      so.seed = cfg.seed + 1;
      so.out_dir = dir / "fake";
      commands::sample(so);
      ad::NoGradGuard ng;
      if (model == "gan") {
        const gan::Generator fresh(gan::load_generator(ck).config(), cfg.seed);
        append(base, from_tensor("untrained", gan::sample(fresh, c, n, cfg.seed + 1), c));
      } else {
        const auto loaded = diffusion::load_model(ck);
        const diffusion::UNet1D fresh(loaded.net.config(), cfg.seed);
        diffusion::SamplerConfig sc{.num_steps = cfg.ddpm.sampler.num_steps, .guidance = cfg.ddpm.sampler.guidance};
        append(base, from_tensor("untrained",
                                 diffusion::sample(fresh, c, n, loaded.length, sc, loaded.sched, cfg.seed + 1), c));
      }
    }
    fake = load_dir("trained", dir / "fake");

    const double mmd_t = metrics::mmd_unbiased(real, fake);
    const double mmd_u = metrics::mmd_unbiased(real, base);
    o.check(mmd_t < mmd_u, fmt("%s: MMD(real, trained) %.4f < MMD(real, untrained) %.4f", model.c_str(), mmd_t,
                               mmd_u));

    metrics::EvalOptions opt;
    opt.sample_rate = manifest.sample_rate;
    const auto bands = signal::canonical_bands(opt.sample_rate);
    for (int c = 0; c < static_cast<int>(K); ++c) {
      const auto rc = of_class(real, c);
      const auto power = metrics::mean_band_power(rc, opt);
      const std::size_t b = std::max_element(power.begin(), power.end()) - power.begin();
      const double et = metrics::bandwise_rel_err(rc, of_class(fake, c), opt)[b];
      const double eu = metrics::bandwise_rel_err(rc, of_class(base, c), opt)[b];
      const double gain = 1.0 - et / eu;
      o.check(gain >= 0.30, fmt("%s: %s dominant band %s RelErr %.3f vs untrained %.3f (improvement %.0f%%, need 30%%)",
                                model.c_str(), manifest.class_map.name_of(c).c_str(), bands[b].name.c_str(), et, eu,
                                100.0 * gain));
    }
  }
  return o;
}

// ---------------------------------------------------------------- 10

/// Moves every spectral component up by `bins` DFT bins (naive transform, test side).
Matrix shift_spectrum(const Matrix& w, std::size_t bins) {
  const std::size_t n = w.cols;
  Matrix out(w.rows, n);
  std::vector<std::complex<double>> X(n / 2 + 1);
  for (std::size_t r = 0; r < w.rows; ++r) {
    const auto x = w.row(r);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) acc += x[t] * std::polar(1.0, -2.0 * M_PI * double(k * t) / double(n));
      X[k] = acc;
    }
    std::vector<std::complex<double>> Y(n / 2 + 1, 0.0);
    Y[0] = X[0];  // keep the mean
    for (std::size_t k = 1; k + bins <= n / 2; ++k) Y[k + bins] = X[k];
    for (std::size_t t = 0; t < n; ++t) {
      double v = Y[0].real();
      for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
        v += f * (Y[k] * std::polar(1.0, 2.0 * M_PI * double(k * t) / double(n))).real();
      }
      out(r, t) = v / double(n);
    }
  }
  return out;
}

Outcome ordering(const Context&) {
  Outcome o;
  const auto real = synthetic_set("real", 30, 100);
  auto matched = synthetic_set("matched", 30, 200);
  auto shifted = matched;
  shifted.origin = "shifted";
  for (auto& w : shifted.windows) w = shift_spectrum(w, 15);

  metrics::EvalOptions opt;
  const auto rep = metrics::evaluate(real, {matched, shifted}, opt);
  const auto& a = rep.models.at(0);
  const auto& b = rep.models.at(1);
  double mmd_a = 0.0, mmd_b = 0.0;
  for (const auto& p : rep.pairs) {
    if (p.a == "real" && p.b == "matched") mmd_a = p.value;
    if (p.a == "real" && p.b == "shifted") mmd_b = p.value;
  }
  const bool mmd_order = mmd_a < mmd_b;
  o.check(mmd_order, fmt("MMD matched %.4f < shifted %.4f", mmd_a, mmd_b));
  for (std::size_t i = 0; i < rep.bands.size(); ++i) {
    const bool same = (a.rel_err[i] < b.rel_err[i]) == mmd_order;
    o.check(same && a.rel_err[i] < b.rel_err[i], fmt("%s: RelErr matched %.3f < shifted %.3f",
                                                     rep.bands[i].name.c_str(), a.rel_err[i], b.rel_err[i]));
  }
  return o;
}

// ---------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Files under `root` keyed by relative path, run records (timestamps) excluded.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name.rfind("run", 0) == 0 && e.path().extension() == ".json") continue;
    out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

Outcome determinism(const Context& ctx) {
  Outcome o;
  const char* yaml = R"(
seed: 11
data:
  synthetic: {n_per_class: 12, subjects: 6}
model:
  gan: {latent_dim: 8, generator_widths: [8, 8, 8, 8], critic_widths: [4, 4, 8, 8], batch_size: 8, max_steps: 4, n_critic: 2}
  ddpm: {widths: [8, 8], embed_dim: 8, groups: 4, timesteps: 50, batch_size: 8, max_steps: 4, sampler: {steps: 5}}
)";
  auto pipeline = [&](const fs::path& root) {
    fs::remove_all(root);
    auto cfg = parse_config(yaml, "determinism.yaml");
    const auto g = commands::curate(cfg, {}, root / "gdata");
    commands::train(cfg, "gan", g.manifest, root / "gan");
    cfg.data.normalization = data::NormScheme::zscore_recording;
    const auto d = commands::curate(cfg, {}, root / "ddata");
    commands::train(cfg, "ddpm", d.manifest, root / "ddpm");
    for (const std::string m : {"gan", "ddpm"})
      for (int c = 0; c < 5; c += 2) {
        commands::SampleOptions so;
        so.checkpoint = root / m / "model.agck";
        so.label = c;
        so.count = 4;
        so.seed = 99;
        so.out_dir = root / ("fake_" + m);
        commands::sample(so);
      }
    commands::evaluate(cfg, d.manifest, {{"ddpm", root / "fake_ddpm"}}, root / "eval_d");
    cfg.data.normalization = data::NormScheme::minmax_window;
    commands::evaluate(cfg, g.manifest, {{"wgan", root / "fake_gan"}}, root / "eval_g");
    return tree(root);
  };
  const auto a = pipeline(ctx.work / "det_a");
  const auto b = pipeline(ctx.work / "det_b");
  std::size_t windows = 0, checkpoints = 0, reports = 0, differing = 0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it == b.end() || it->second != v) {
      ++differing;
      o.notes.push_back("!! differs: " + k);
    }
    const auto ext = fs::path(k).extension();
    windows += ext == ".agw";
    checkpoints += ext == ".agck";
    reports += fs::path(k).filename() == "report.json";
  }
  o.check(differing == 0 && a.size() == b.size(),
          fmt("%zu files compared (%zu windows, %zu checkpoints, %zu reports), %zu differ", a.size(), windows,
              checkpoints, reports, differing));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only;
  Context ctx;
  ctx.configs = ARTIFACTGEN_CONFIG_DIR;
  ctx.work = fs::temp_directory_path() / "artifactgen-acceptance";
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_option("--configs", ctx.configs, "directory with toy_gan.yaml and toy_ddpm.yaml");
  app.add_option("--work", ctx.work, "scratch directory");
  app.add_option("--models", ctx.models, "models of the toy run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  std::set<int> selected;
  std::stringstream ss(only);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) selected.insert(std::stoi(tok));
  fs::create_directories(ctx.work);

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
      {"windowing oracle", windowing},
      {"normalization", normalization},
      {"gradient correctness", gradients},
      {"gradient-penalty closed form", penalty_closed_form},
      {"projection identity", projection_identity},
      {"forward-process statistics", forward_process},
      {"guidance identities", guidance_identities},
      {"metric nulls and oracles", metric_nulls},
      {"toy end-to-end run", toy_run},
      {"ordering of matched vs shifted sets", ordering},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first
              << fmt(" (%.1f s)", seconds_since(t0)) << "\n";
    for (const auto& n : out.notes) std::cout << "    " << n << "\n";
    std::cout.flush();
    failed += !out.pass;
  }
  return failed ? 1 : 0;
}
