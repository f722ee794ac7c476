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

#include "artifactgen/dataset.hpp"
#include "artifactgen/signal.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace artifactgen::metrics {

/// Uniformly shaped windows with labels. `origin` names the source ("real", "ddpm", "wgan", ...).
struct WindowSet {
  std::string origin;
  std::vector<Matrix> windows;
  std::vector<int> labels;

  std::size_t size() const { return windows.size(); }
  std::size_t channels() const { return windows.empty() ? 0 : windows.front().rows; }
  std::size_t length() const { return windows.empty() ? 0 : windows.front().cols; }
};

WindowSet make_set(std::string origin, const std::vector<data::Window>& windows);
/// Throws on empty sets, ragged shapes or non-finite samples.
void validate_set(const WindowSet& s);

struct EvalOptions {
  double sample_rate = 250.0;
  std::optional<signal::WelchOptions> welch;  // default: welch_defaults(L)
  std::vector<signal::BandSpec> bands;          // default: canonical_bands(fs)
  std::size_t max_lag = 50;
  std::size_t knn_k = 5;
  double rel_eps = 1e-8;
};

/// Mean band power per band over windows and channels.
std::vector<double> mean_band_power(const WindowSet& s, const EvalOptions& opt);
std::vector<double> bandwise_rel_err(const WindowSet& real, const WindowSet& fake, const EvalOptions& opt = {});

/// Squared L2 distance between set- and channel-averaged PSDs.
double psd_l2_error(const WindowSet& a, const WindowSet& b, const EvalOptions& opt = {});

struct MeanDiscrepancy {
  std::vector<double> delta;  // fake - real, per channel
  double mean_effect = 0.0;   // mean |delta|
};
MeanDiscrepancy channel_mean_discrepancy(const WindowSet& real, const WindowSet& fake);

using Vectors = std::vector<std::vector<double>>;
Vectors flatten(const WindowSet& s);

/// Median of the pairwise Euclidean distances over the pooled set (distinct pairs).
double median_heuristic(const Vectors& x, const Vectors& y);
/// Unbiased MMD^2 with k(a,b) = exp(-|a-b|^2 / (2 sigma^2)).
double mmd_unbiased(const Vectors& x, const Vectors& y, double sigma);
double mmd_unbiased(const WindowSet& x, const WindowSet& y);

struct Diversity {
  double value = 0.0;
  std::size_t constant_windows = 0;  // pairs with these windows count as zero correlation
};
Diversity diversity(const WindowSet& s);

double cov_frobenius(const WindowSet& a, const WindowSet& b);
double acf_l2(const WindowSet& a, const WindowSet& b, std::size_t max_lag = 50);

/// Leave-one-out 1-NN real/fake accuracy on the pooled set. Candidates identical to the
/// query are skipped; ties go to the lower pooled index (real first).
double one_nn_accuracy(const WindowSet& real, const WindowSet& fake);

struct KnnRecovery {
  std::vector<std::optional<double>> per_class;  // nullopt: unevaluable
  std::vector<std::string> reasons;              // empty when evaluable
  double macro = 0.0;
};
KnnRecovery knn_class_recovery(const WindowSet& real_train, const WindowSet& fake, std::size_t k,
                               std::size_t classes);

struct ModelMetrics {
  std::string name;
  std::vector<double> rel_err;  // per band
  double psd_l2 = 0.0;
  MeanDiscrepancy mean;
  double diversity = 0.0;
  std::size_t constant_windows = 0;
  double cov_frob = 0.0;
  double acf_l2 = 0.0;
  double one_nn_acc = 0.0;
  KnnRecovery knn;
};

struct PairMmd {
  std::string a;  // "real" or a model name
  std::string b;
  double value = 0.0;
  double sigma = 0.0;  // kernel bandwidth used for this pair
};

struct MetricReport {
  double sample_rate = 250.0;
  signal::WelchOptions welch;
  std::vector<signal::BandSpec> bands;
  std::size_t max_lag = 50;
  std::size_t knn_k = 5;
  std::string normalization;
  std::vector<std::string> class_names;
  std::vector<std::string> channel_names;
  std::map<std::string, std::uint64_t> seeds;
  std::size_t real_count = 0;
  double real_diversity = 0.0;
  std::vector<ModelMetrics> models;
  std::vector<PairMmd> pairs;  // real vs each model, then model vs model
  std::map<std::string, std::string> skipped;

  bool operator==(const MetricReport&) const;
};

/// Full evaluation of each fake set against `real`; kNN recovery is fitted on `real_train`.
MetricReport evaluate(const WindowSet& real, const std::vector<WindowSet>& fakes, const EvalOptions& opt,
                      const WindowSet* real_train = nullptr, std::size_t classes = 0);

std::string report_to_json(const MetricReport& r);
MetricReport report_from_json(const std::string& text);
std::string report_table(const MetricReport& r);

/// "ddpm" -> "d", "wgan" -> "g", otherwise the name itself.
std::string model_prefix(const std::string& name);

}  // namespace artifactgen::metrics
