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

#include "artifactgen/metrics.hpp"

#include "artifactgen/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace artifactgen::metrics {

using nlohmann::json;

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc[4] = {0, 0, 0, 0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t u = 0; u < 4; ++u) {
      const double d = a[i + u] - b[i + u];
      acc[u] += d * d;
    }
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += (a[i] - b[i]) * (a[i] - b[i]);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
}

void require_same_shape(const WindowSet& a, const WindowSet& b, const char* what) {
  validate_set(a);
  validate_set(b);
  require(a.channels() == b.channels() && a.length() == b.length(), ErrorKind::invalid_argument,
          std::string(what) + ": set '" + a.origin + "' is " + std::to_string(a.channels()) + "x" +
              std::to_string(a.length()) + " but '" + b.origin + "' is " + std::to_string(b.channels()) + "x" +
              std::to_string(b.length()));
}

signal::WelchOptions welch_for(const WindowSet& s, const EvalOptions& opt) {
  return opt.welch ? *opt.welch : signal::welch_defaults(s.length());
}

std::vector<signal::BandSpec> bands_for(const EvalOptions& opt) {
  return opt.bands.empty() ? signal::canonical_bands(opt.sample_rate) : opt.bands;
}

std::vector<double> mean_psd(const WindowSet& s, const signal::WelchOptions& w, double fs,
                             std::vector<double>* freqs = nullptr) {
  std::vector<double> acc;
  std::size_t count = 0;
  for (const auto& win : s.windows) {
    for (std::size_t c = 0; c < win.rows; ++c) {
      const auto psd = signal::welch_psd(win.row(c), fs, w);
      if (acc.empty()) {
        acc.assign(psd.power.size(), 0.0);
        if (freqs) *freqs = psd.freqs;
      }
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += psd.power[k];
      ++count;
    }
  }
  for (double& v : acc) v /= static_cast<double>(count);
  return acc;
}

Matrix mean_covariance(const WindowSet& s) {
  Matrix acc(s.channels(), s.channels());
  for (const auto& w : s.windows) {
    const Matrix c = signal::channel_covariance(w);
    for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += c.data[i];
  }
  for (double& v : acc.data) v /= static_cast<double>(s.size());
  return acc;
}

std::vector<double> mean_acf(const WindowSet& s, std::size_t max_lag) {
  std::vector<double> acc(max_lag + 1, 0.0);
  std::size_t count = 0;
  for (const auto& w : s.windows) {
    for (std::size_t c = 0; c < w.rows; ++c) {
      const auto r = signal::autocorrelation(w.row(c), max_lag);
      for (std::size_t k = 0; k <= max_lag; ++k) acc[k] += r.r[k];
      ++count;
    }
  }
  for (double& v : acc) v /= static_cast<double>(count);
  return acc;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b, bool& constant) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    constant = true;
    return 0.0;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

// ------------------------------------------------------------------ sets

WindowSet make_set(std::string origin, const std::vector<data::Window>& windows) {
  WindowSet s;
  s.origin = std::move(origin);
  s.windows.reserve(windows.size());
  for (const auto& w : windows) {
    s.windows.push_back(w.data);
    s.labels.push_back(w.label);
  }
  return s;
}

void validate_set(const WindowSet& s) {
  require(!s.windows.empty(), ErrorKind::invalid_argument, "window set '" + s.origin + "' is empty");
  require(s.labels.empty() || s.labels.size() == s.windows.size(), ErrorKind::invalid_argument,
          "window set '" + s.origin + "': label count differs from window count");
  const std::size_t c = s.channels(), l = s.length();
  for (std::size_t i = 0; i < s.windows.size(); ++i) {
    const auto& w = s.windows[i];
    require(w.rows == c && w.cols == l, ErrorKind::invalid_argument,
            "window set '" + s.origin + "': window " + std::to_string(i) + " is " + std::to_string(w.rows) + "x" +
                std::to_string(w.cols) + ", expected " + std::to_string(c) + "x" + std::to_string(l));
    for (double v : w.data) {
      require(std::isfinite(v), ErrorKind::invalid_argument,
              "window set '" + s.origin + "': window " + std::to_string(i) + " contains a non-finite sample");
    }
  }
}

Vectors flatten(const WindowSet& s) {
  Vectors out;
  out.reserve(s.size());
  for (const auto& w : s.windows) out.push_back(w.data);
  return out;
}

// ------------------------------------------------------------------ spectral

std::vector<double> mean_band_power(const WindowSet& s, const EvalOptions& opt) {
  validate_set(s);
  const auto w = welch_for(s, opt);
  const auto bands = bands_for(opt);
  std::vector<double> acc(bands.size(), 0.0);
  std::size_t count = 0;
  for (const auto& win : s.windows) {
    for (std::size_t c = 0; c < win.rows; ++c) {
      const auto psd = signal::welch_psd(win.row(c), opt.sample_rate, w);
      for (std::size_t b = 0; b < bands.size(); ++b) acc[b] += signal::band_power(psd, bands[b]).value;
      ++count;
    }
  }
  for (double& v : acc) v /= static_cast<double>(count);
  return acc;
}

std::vector<double> bandwise_rel_err(const WindowSet& real, const WindowSet& fake, const EvalOptions& opt) {
  require_same_shape(real, fake, "bandwise_rel_err");
  const auto pr = mean_band_power(real, opt);
  const auto pf = mean_band_power(fake, opt);
  std::vector<double> out(pr.size());
  for (std::size_t b = 0; b < pr.size(); ++b) out[b] = std::fabs(pf[b] - pr[b]) / (pr[b] + opt.rel_eps);
  return out;
}

double psd_l2_error(const WindowSet& a, const WindowSet& b, const EvalOptions& opt) {
  validate_set(a);
  validate_set(b);
  require(a.length() == b.length(), ErrorKind::invalid_argument,
          "psd_l2_error: frequency grids differ (window lengths " + std::to_string(a.length()) + " vs " +
              std::to_string(b.length()) + ")");
  const auto w = welch_for(a, opt);
  std::vector<double> fa, fb;
  const auto pa = mean_psd(a, w, opt.sample_rate, &fa);
  const auto pb = mean_psd(b, w, opt.sample_rate, &fb);
  require(fa == fb, ErrorKind::invalid_argument, "psd_l2_error: frequency grids differ");
  double s = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) s += (pa[k] - pb[k]) * (pa[k] - pb[k]);
  return s;
}

MeanDiscrepancy channel_mean_discrepancy(const WindowSet& real, const WindowSet& fake) {
  require_same_shape(real, fake, "channel_mean_discrepancy");
  auto grand = [](const WindowSet& s) {
    std::vector<double> m(s.channels(), 0.0);
    for (const auto& w : s.windows)
      for (std::size_t c = 0; c < w.rows; ++c)
        for (double v : w.row(c)) m[c] += v;
    for (double& v : m) v /= static_cast<double>(s.size() * s.length());
    return m;
  };
  const auto mr = grand(real);
  const auto mf = grand(fake);
  MeanDiscrepancy out;
  out.delta.resize(mr.size());
  for (std::size_t c = 0; c < mr.size(); ++c) {
    out.delta[c] = mf[c] - mr[c];
    out.mean_effect += std::fabs(out.delta[c]);
  }
  out.mean_effect /= static_cast<double>(mr.size());
  return out;
}

// ------------------------------------------------------------------ kernel two-sample

double median_heuristic(const Vectors& x, const Vectors& y) {
  Vectors pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<double> d;
  d.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) d.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
  require(!d.empty(), ErrorKind::invalid_argument, "median heuristic needs at least two points");
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double med = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  if (med > 0.0) return med;
  // More than half the pairs coincide; fall back to the mean nonzero distance (or 1).
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : d)
    if (v > 0.0) {
      sum += v;
      ++n;
    }
  return n > 0 ? sum / static_cast<double>(n) : 1.0;
}

double mmd_unbiased(const Vectors& x, const Vectors& y, double sigma) {
  require(x.size() >= 2 && y.size() >= 2, ErrorKind::invalid_argument, "mmd needs at least two samples per set");
  require(sigma > 0.0, ErrorKind::invalid_argument, "mmd bandwidth must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto k = [&](const std::vector<double>& a, const std::vector<double>& b) { return std::exp(-sq_dist(a, b) * inv); };
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) sxx += k(x[i], x[j]);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j) syy += k(y[i], y[j]);
  for (const auto& a : x)
    for (const auto& b : y) sxy += k(a, b);
  return 2.0 * sxx / (m * (m - 1.0)) + 2.0 * syy / (n * (n - 1.0)) - 2.0 * sxy / (m * n);
}

double mmd_unbiased(const WindowSet& x, const WindowSet& y) {
  require_same_shape(x, y, "mmd");
  const auto fx = flatten(x);
  const auto fy = flatten(y);
  return mmd_unbiased(fx, fy, median_heuristic(fx, fy));
}

// ------------------------------------------------------------------ structure

Diversity diversity(const WindowSet& s) {
  validate_set(s);
  require(s.size() >= 2, ErrorKind::invalid_argument, "diversity needs at least two windows");
  const auto f = flatten(s);
  std::size_t flat_windows = 0;
  for (const auto& w : f) {
    if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); })) ++flat_windows;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      bool flat = false;
      sum += pearson(f[i], f[j], flat);
    }
  }
  const double pairs = static_cast<double>(f.size() * (f.size() - 1) / 2);
  Diversity out;
  out.value = 1.0 - sum / pairs;
  out.constant_windows = flat_windows;
  return out;
}

double cov_frobenius(const WindowSet& a, const WindowSet& b) {
  require_same_shape(a, b, "cov_frobenius");
  const Matrix ca = mean_covariance(a);
  const Matrix cb = mean_covariance(b);
  double s = 0.0;
  for (std::size_t i = 0; i < ca.data.size(); ++i) s += (ca.data[i] - cb.data[i]) * (ca.data[i] - cb.data[i]);
  return std::sqrt(s);
}

double acf_l2(const WindowSet& a, const WindowSet& b, std::size_t max_lag) {
  require_same_shape(a, b, "acf_l2");
  require(max_lag < a.length(), ErrorKind::invalid_argument, "acf_l2: max_lag must be < L");
  const auto ra = mean_acf(a, max_lag);
  const auto rb = mean_acf(b, max_lag);
  double s = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) s += (ra[k] - rb[k]) * (ra[k] - rb[k]);
  return std::sqrt(s);
}

// ------------------------------------------------------------------ nearest neighbours

double one_nn_accuracy(const WindowSet& real, const WindowSet& fake) {
  require_same_shape(real, fake, "one_nn_accuracy");
  Vectors pooled = flatten(real);
  const auto ff = flatten(fake);
  pooled.insert(pooled.end(), ff.begin(), ff.end());
  const std::size_t nr = real.size();
  require(pooled.size() >= 4, ErrorKind::invalid_argument, "one_nn_accuracy needs at least 4 pooled windows");
  double correct = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    std::size_t best = pooled.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (j == i) continue;
      const double d = sq_dist(pooled[i], pooled[j]);
      if (d == 0.0 && pooled[i] == pooled[j]) continue;
      if (best == pooled.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == pooled.size()) {
      correct += 0.5;  // every other point coincides with the query: no information
    } else if ((i < nr) == (best < nr)) {
      correct += 1.0;
    }
  }
  return correct / static_cast<double>(pooled.size());
}

KnnRecovery knn_class_recovery(const WindowSet& real_train, const WindowSet& fake, std::size_t k,
                               std::size_t classes) {
  require_same_shape(real_train, fake, "knn_class_recovery");
  require(k >= 1, ErrorKind::invalid_argument, "knn: k must be >= 1");
  require(real_train.labels.size() == real_train.size() && fake.labels.size() == fake.size(),
          ErrorKind::invalid_argument, "knn: both sets must be labelled");
  if (classes == 0) {
    for (int l : real_train.labels) classes = std::max(classes, static_cast<std::size_t>(l) + 1);
    for (int l : fake.labels) classes = std::max(classes, static_cast<std::size_t>(l) + 1);
  }
  const auto train = flatten(real_train);
  const auto test = flatten(fake);
  const std::size_t kk = std::min(k, train.size());

  std::vector<std::size_t> in_train(classes, 0), total(classes, 0), hits(classes, 0);
  for (int l : real_train.labels) ++in_train.at(static_cast<std::size_t>(l));

  std::vector<std::pair<double, std::size_t>> d(train.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t j = 0; j < train.size(); ++j) d[j] = {sq_dist(test[i], train[j]), j};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    std::vector<std::size_t> votes(classes, 0);
    for (std::size_t q = 0; q < kk; ++q) ++votes[static_cast<std::size_t>(real_train.labels[d[q].second])];
    const std::size_t top = *std::max_element(votes.begin(), votes.end());
    // Tied classes resolve to whichever appears first in distance order.
    int pred = -1;
    for (std::size_t q = 0; q < kk && pred < 0; ++q) {
      const int l = real_train.labels[d[q].second];
      if (votes[static_cast<std::size_t>(l)] == top) pred = l;
    }
    const auto truth = static_cast<std::size_t>(fake.labels[i]);
    require(truth < classes, ErrorKind::invalid_argument, "knn: fake label out of range");
    ++total[truth];
    if (pred == fake.labels[i]) ++hits[truth];
  }

  KnnRecovery out;
  out.per_class.resize(classes);
  out.reasons.resize(classes);
  double sum = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (in_train[c] == 0) {
      out.reasons[c] = "class missing from the real training set";
    } else if (total[c] == 0) {
      out.reasons[c] = "no synthetic windows of this class";
    } else {
      out.per_class[c] = static_cast<double>(hits[c]) / static_cast<double>(total[c]);
      sum += *out.per_class[c];
      ++evaluated;
    }
  }
  out.macro = evaluated > 0 ? sum / static_cast<double>(evaluated) : 0.0;
  return out;
}

// ------------------------------------------------------------------ report

std::string model_prefix(const std::string& name) {
  if (name == "ddpm") return "d";
  if (name == "wgan") return "g";
  return name;
}

bool MetricReport::operator==(const MetricReport& o) const { return report_to_json(*this) == report_to_json(o); }

MetricReport evaluate(const WindowSet& real, const std::vector<WindowSet>& fakes, const EvalOptions& opt,
                      const WindowSet* real_train, std::size_t classes) {
  validate_set(real);
  MetricReport r;
  r.sample_rate = opt.sample_rate;
  r.welch = welch_for(real, opt);
  r.bands = bands_for(opt);
  r.max_lag = opt.max_lag;
  r.knn_k = opt.knn_k;
  r.real_count = real.size();
  EvalOptions fixed = opt;
  fixed.welch = r.welch;
  fixed.bands = r.bands;

  if (real.size() >= 2) {
    r.real_diversity = diversity(real).value;
  } else {
    r.skipped["diversity.real"] = "fewer than two real windows";
  }
  for (const auto& f : fakes) {
    require_same_shape(real, f, "evaluate");
    require(f.origin != "real", ErrorKind::invalid_argument, "a synthetic set may not be named 'real'");
    ModelMetrics m;
    m.name = f.origin;
    m.rel_err = bandwise_rel_err(real, f, fixed);
    m.psd_l2 = psd_l2_error(real, f, fixed);
    m.mean = channel_mean_discrepancy(real, f);
    if (f.size() >= 2) {
      const auto d = diversity(f);
      m.diversity = d.value;
      m.constant_windows = d.constant_windows;
    } else {
      r.skipped["diversity." + f.origin] = "fewer than two windows";
    }
    m.cov_frob = cov_frobenius(real, f);
    m.acf_l2 = acf_l2(real, f, opt.max_lag);
    if (real.size() + f.size() >= 4) {
      m.one_nn_acc = one_nn_accuracy(real, f);
    } else {
      r.skipped["one_nn_acc." + f.origin] = "fewer than four pooled windows";
    }
    const WindowSet& train = real_train ? *real_train : real;
    if (!train.labels.empty() && !f.labels.empty()) {
      m.knn = knn_class_recovery(train, f, opt.knn_k, classes);
    } else {
      r.skipped["knn_recovery." + f.origin] = "unlabelled windows";
    }
    r.models.push_back(std::move(m));
  }

  auto add_pair = [&](const WindowSet& a, const WindowSet& b) {
    if (a.size() < 2 || b.size() < 2) {
      r.skipped["mmd." + a.origin + "." + b.origin] = "fewer than two windows";
      return;
    }
    const auto fa = flatten(a);
    const auto fb = flatten(b);
    const double sigma = median_heuristic(fa, fb);
    r.pairs.push_back({a.origin, b.origin, mmd_unbiased(fa, fb, sigma), sigma});
  };
  for (const auto& f : fakes) add_pair(real, f);
  for (std::size_t i = 0; i < fakes.size(); ++i)
    for (std::size_t j = i + 1; j < fakes.size(); ++j) add_pair(fakes[i], fakes[j]);
  return r;
}

namespace {

std::string pair_key(const PairMmd& p) {
  return p.a == "real" ? "mmd_r_" + p.b : "mmd_" + p.a + "_" + p.b;
}

std::string taper_name(signal::Taper t) { return t == signal::Taper::hann ? "hann" : "boxcar"; }

}  // namespace

std::string report_to_json(const MetricReport& r) {
  json meta;
  meta["welch"] = {{"nperseg", r.welch.nperseg},
                   {"overlap_frac", r.welch.overlap_frac},
                   {"taper", taper_name(r.welch.taper)},
                   {"detrend", r.welch.detrend}};
  json bands = json::array();
  for (const auto& b : r.bands) bands.push_back({{"name", b.name}, {"lo", b.lo}, {"hi", b.hi}});
  meta["bands"] = bands;
  meta["kernel"] = {{"type", "rbf"}, {"bandwidth", "median_heuristic"}};
  meta["feature_space"] = "flattened_window";
  meta["normalization"] = r.normalization;
  meta["sample_rate"] = r.sample_rate;
  meta["max_lag"] = r.max_lag;
  meta["knn_k"] = r.knn_k;
  meta["seeds"] = r.seeds;
  meta["class_names"] = r.class_names;
  meta["channel_names"] = r.channel_names;
  meta["real_count"] = r.real_count;
  json names = json::array();
  for (const auto& m : r.models) names.push_back(m.name);
  meta["models"] = names;

  json mx = json::object();
  for (std::size_t b = 0; b < r.bands.size(); ++b) {
    json per = json::object();
    for (const auto& m : r.models) per[m.name] = m.rel_err.at(b);
    mx["rel_err_" + r.bands[b].name] = per;
  }
  json psd = json::object(), div = json::object(), cov = json::object(), acf = json::object(),
       nn1 = json::object(), knn = json::object(), constant = json::object();
  div["real"] = r.real_diversity;
  for (const auto& m : r.models) {
    psd[m.name] = m.psd_l2;
    mx[model_prefix(m.name) + "_mu_diff"] = m.mean.delta;
    mx[model_prefix(m.name) + "_mean_effect"] = m.mean.mean_effect;
    div[m.name] = m.diversity;
    constant[m.name] = m.constant_windows;
    cov[m.name] = m.cov_frob;
    acf[m.name] = m.acf_l2;
    nn1[m.name] = m.one_nn_acc;
    json per = json::array(), why = json::array();
    for (std::size_t c = 0; c < m.knn.per_class.size(); ++c) {
      per.push_back(m.knn.per_class[c] ? json(*m.knn.per_class[c]) : json(nullptr));
      why.push_back(m.knn.reasons[c]);
    }
    knn[m.name] = {{"per_class", per}, {"unevaluable", why}, {"macro", m.knn.macro}};
  }
  mx["psd_l2"] = psd;
  json bw = json::object();
  for (const auto& p : r.pairs) {
    mx[pair_key(p)] = p.value;
    bw[pair_key(p)] = p.sigma;
  }
  mx["mmd_bandwidth"] = bw;
  mx["diversity"] = div;
  mx["constant_windows"] = constant;
  mx["cov_frob"] = cov;
  mx["acf_l2"] = acf;
  mx["one_nn_acc"] = nn1;
  mx["knn_recovery"] = knn;

  json out{{"meta", meta}, {"metrics", mx}, {"skipped", r.skipped}};
  return out.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
  MetricReport r;
  try {
    const json j = json::parse(text);
    const json& meta = j.at("meta");
    const json& mx = j.at("metrics");
    const json& w = meta.at("welch");
    r.welch.nperseg = w.at("nperseg").get<std::size_t>();
    r.welch.overlap_frac = w.at("overlap_frac").get<double>();
    r.welch.taper = w.at("taper").get<std::string>() == "hann" ? signal::Taper::hann : signal::Taper::boxcar;
    r.welch.detrend = w.at("detrend").get<bool>();
    for (const auto& b : meta.at("bands")) r.bands.push_back({b.at("name"), b.at("lo"), b.at("hi")});
    r.normalization = meta.at("normalization").get<std::string>();
    r.sample_rate = meta.at("sample_rate").get<double>();
    r.max_lag = meta.at("max_lag").get<std::size_t>();
    r.knn_k = meta.at("knn_k").get<std::size_t>();
    r.seeds = meta.at("seeds").get<std::map<std::string, std::uint64_t>>();
    r.class_names = meta.at("class_names").get<std::vector<std::string>>();
    r.channel_names = meta.at("channel_names").get<std::vector<std::string>>();
    r.real_count = meta.at("real_count").get<std::size_t>();
    r.real_diversity = mx.at("diversity").at("real").get<double>();
    const auto names = meta.at("models").get<std::vector<std::string>>();
    for (const auto& name : names) {
      ModelMetrics m;
      m.name = name;
      for (const auto& b : r.bands) m.rel_err.push_back(mx.at("rel_err_" + b.name).at(name).get<double>());
      m.psd_l2 = mx.at("psd_l2").at(name).get<double>();
      m.mean.delta = mx.at(model_prefix(name) + "_mu_diff").get<std::vector<double>>();
      m.mean.mean_effect = mx.at(model_prefix(name) + "_mean_effect").get<double>();
      m.diversity = mx.at("diversity").at(name).get<double>();
      m.constant_windows = mx.at("constant_windows").at(name).get<std::size_t>();
      m.cov_frob = mx.at("cov_frob").at(name).get<double>();
      m.acf_l2 = mx.at("acf_l2").at(name).get<double>();
      m.one_nn_acc = mx.at("one_nn_acc").at(name).get<double>();
      const json& k = mx.at("knn_recovery").at(name);
      for (const auto& v : k.at("per_class"))
        m.knn.per_class.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
      m.knn.reasons = k.at("unevaluable").get<std::vector<std::string>>();
      m.knn.macro = k.at("macro").get<double>();
      r.models.push_back(std::move(m));
    }
    const json& bw = mx.at("mmd_bandwidth");
    auto find_pair = [&](const std::string& a, const std::string& b) {
      PairMmd p{a, b, 0.0, 0.0};
      const std::string key = pair_key(p);
      if (!mx.contains(key)) return;
      p.value = mx.at(key).get<double>();
      p.sigma = bw.at(key).get<double>();
      r.pairs.push_back(p);
    };
    for (const auto& n : names) find_pair("real", n);
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j) find_pair(names[i], names[j]);
    r.skipped = j.at("skipped").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("metric report: ") + e.what());
  }
  return r;
}

std::string report_table(const MetricReport& r) {
  std::ostringstream out;
  char buf[256];
  auto row = [&](const std::string& label, const std::vector<double>& vals) {
    std::snprintf(buf, sizeof buf, "%-18s", label.c_str());
    out << buf;
    for (double v : vals) {
      std::snprintf(buf, sizeof buf, " %14.6g", v);
      out << buf;
    }
    out << '\n';
  };
  auto header = [&](const std::string& title) {
    std::snprintf(buf, sizeof buf, "%-18s", title.c_str());
    out << buf;
    for (const auto& m : r.models) {
      std::snprintf(buf, sizeof buf, " %14s", m.name.c_str());
      out << buf;
    }
    out << '\n';
  };

  out << "feature space: flattened windows; normalization: "
      << (r.normalization.empty() ? "unspecified" : r.normalization) << "; real windows: " << r.real_count << "\n\n";
  header("band rel. error");
  for (std::size_t b = 0; b < r.bands.size(); ++b) {
    std::vector<double> v;
    for (const auto& m : r.models) v.push_back(m.rel_err[b]);
    row(r.bands[b].name, v);
  }
  auto metric_row = [&](const std::string& label, auto get) {
    std::vector<double> v;
    for (const auto& m : r.models) v.push_back(get(m));
    row(label, v);
  };
  out << '\n';
  header("distances");
  metric_row("psd_l2", [](const ModelMetrics& m) { return m.psd_l2; });
  metric_row("cov_frob", [](const ModelMetrics& m) { return m.cov_frob; });
  metric_row("acf_l2", [](const ModelMetrics& m) { return m.acf_l2; });
  metric_row("mean_effect", [](const ModelMetrics& m) { return m.mean.mean_effect; });
  metric_row("diversity", [](const ModelMetrics& m) { return m.diversity; });
  metric_row("one_nn_acc", [](const ModelMetrics& m) { return m.one_nn_acc; });
  metric_row("knn_macro", [](const ModelMetrics& m) { return m.knn.macro; });
  std::snprintf(buf, sizeof buf, "%-18s %14.6g\n", "diversity (real)", r.real_diversity);
  out << buf;

  out << "\nMMD (unbiased, RBF)\n";
  for (const auto& p : r.pairs) {
    std::snprintf(buf, sizeof buf, "  %-24s %14.6g   (sigma %.4g)\n", (p.a + " - " + p.b).c_str(), p.value, p.sigma);
    out << buf;
  }

  out << '\n';
  header("channel delta mu");
  const std::size_t nc = r.models.empty() ? 0 : r.models.front().mean.delta.size();
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<double> v;
    for (const auto& m : r.models) v.push_back(m.mean.delta[c]);
    row(c < r.channel_names.size() ? r.channel_names[c] : "ch" + std::to_string(c), v);
  }

  if (!r.models.empty() && !r.models.front().knn.per_class.empty()) {
    out << '\n';
    header("kNN recovery");
    for (std::size_t c = 0; c < r.models.front().knn.per_class.size(); ++c) {
      const std::string name = c < r.class_names.size() ? r.class_names[c] : "class" + std::to_string(c);
      std::snprintf(buf, sizeof buf, "%-18s", name.c_str());
      out << buf;
      for (const auto& m : r.models) {
        if (c < m.knn.per_class.size() && m.knn.per_class[c]) {
          std::snprintf(buf, sizeof buf, " %14.6g", *m.knn.per_class[c]);
        } else {
          std::snprintf(buf, sizeof buf, " %14s", "n/a");
        }
        out << buf;
      }
      out << '\n';
    }
  }
  if (!r.skipped.empty()) {
    out << "\nskipped\n";
    for (const auto& [k, v] : r.skipped) out << "  " << k << ": " << v << '\n';
  }
  return out.str();
}

}  // namespace artifactgen::metrics
