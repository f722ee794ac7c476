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

#include "artifactgen/training.hpp"

#include "artifactgen/error.hpp"

#include <algorithm>

namespace artifactgen {

WindowBank make_bank(const std::vector<data::Window>& windows, std::size_t classes) {
  require(!windows.empty(), ErrorKind::invalid_argument, "training set is empty");
  const std::size_t nc = windows.front().channels();
  const std::size_t len = windows.front().length();
  std::vector<double> values;
  values.reserve(windows.size() * nc * len);
  WindowBank bank;
  bank.classes = classes;
  for (const auto& w : windows) {
    require(w.channels() == nc && w.length() == len, ErrorKind::invalid_argument,
            "training windows must share one shape");
    require(w.label >= 0 && static_cast<std::size_t>(w.label) < classes, ErrorKind::invalid_argument,
            "window label out of range");
    values.insert(values.end(), w.data.data.begin(), w.data.data.end());
    bank.labels.push_back(w.label);
  }
  bank.data = ad::Tensor::from({windows.size(), nc, len}, std::move(values));
  return bank;
}

ad::Tensor gather(const WindowBank& bank, std::span<const std::size_t> index, std::vector<int>* labels) {
  const std::size_t stride = bank.channels() * bank.length();
  std::vector<double> out(index.size() * stride);
  auto src = bank.data.values();
  if (labels) labels->clear();
  for (std::size_t i = 0; i < index.size(); ++i) {
    std::copy_n(src.data() + index[i] * stride, stride, out.data() + i * stride);
    if (labels) labels->push_back(bank.labels[index[i]]);
  }
  return ad::Tensor::from({index.size(), bank.channels(), bank.length()}, std::move(out));
}

std::vector<std::size_t> draw_indices(std::size_t n, std::size_t count, nn::Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = d(rng);
  return out;
}

std::vector<data::Window> to_windows(const ad::Tensor& batch, std::span<const int> labels) {
  require(batch.rank() == 3 && batch.dim(0) == labels.size(), ErrorKind::internal, "to_windows: shape mismatch");
  const std::size_t nc = batch.dim(1), len = batch.dim(2);
  std::vector<data::Window> out(labels.size());
  auto v = batch.values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i].data = Matrix(nc, len);
    std::copy_n(v.data() + i * nc * len, nc * len, out[i].data.data.begin());
    out[i].label = labels[i];
  }
  return out;
}

double MovingAverage::push(double v) {
  values_.push_back(v);
  sum_ += v;
  if (values_.size() > window_) {
    sum_ -= values_.front();
    values_.pop_front();
  }
  return value();
}

double MovingAverage::value() const { return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size()); }

}  // namespace artifactgen
