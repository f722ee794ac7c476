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
#include "artifactgen/dataset.hpp"
#include "artifactgen/nn.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

namespace artifactgen {

/// All windows of a training set packed as one [N, C, L] tensor.
struct WindowBank {
  ad::Tensor data;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t channels() const { return data.dim(1); }
  std::size_t length() const { return data.dim(2); }
};

WindowBank make_bank(const std::vector<data::Window>& windows, std::size_t classes);

/// Rows of `bank` at `index` as a constant [B, C, L] tensor plus their labels.
ad::Tensor gather(const WindowBank& bank, std::span<const std::size_t> index, std::vector<int>* labels = nullptr);

/// Uniform draws with replacement.
std::vector<std::size_t> draw_indices(std::size_t n, std::size_t count, nn::Rng& rng);

/// Windows of a [B, C, L] tensor.
std::vector<data::Window> to_windows(const ad::Tensor& batch, std::span<const int> labels);

/// Trailing moving average used for checkpoint selection and early stopping.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t window) : window_(window) {}
  double push(double v);
  double value() const;

 private:
  std::size_t window_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

}  // namespace artifactgen
