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

// Reverse-mode automatic differentiation over dense double tensors.
//
// Every op records a node whose backward function is itself written in terms
// of recorded ops, so gradients can be differentiated again (create_graph).
// The exception is group_norm, which uses a fused first-order backward and is
// rejected when a second differentiation pass reaches it.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace artifactgen::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& s);
std::string shape_str(const Shape& s);

class Tensor;
struct Node;

struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  bool leaf_requires_grad = false;
  std::shared_ptr<Node> grad_fn;
  std::vector<double> grad;  // filled by backward() on leaves
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor from(Shape shape, std::vector<double> values);
  static Tensor scalar(double value);

  bool defined() const { return static_cast<bool>(impl_); }
  const Shape& shape() const { return impl_->shape; }
  std::size_t dim(std::size_t i) const { return impl_->shape.at(i); }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t size() const { return impl_->values.size(); }

  std::span<const double> values() const { return impl_->values; }
  /// Direct write access; only meaningful for leaves (parameters, inputs).
  std::span<double> mutable_values() { return impl_->values; }
  double item() const;
  double at(std::size_t flat) const { return impl_->values[flat]; }

  /// True for leaves flagged as trainable and for any tensor produced by a
  /// recorded op.
  bool requires_grad() const;
  Tensor& set_requires_grad(bool flag);
  bool is_leaf() const { return !impl_->grad_fn; }

  const std::vector<double>& grad() const { return impl_->grad; }
  void zero_grad() { impl_->grad.assign(impl_->values.size(), 0.0); }

  /// Same values, no history.
  Tensor detach() const;
  Tensor clone() const;

  TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<Node>& grad_fn() const { return impl_->grad_fn; }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

struct Node {
  std::string name;
  std::vector<Tensor> inputs;
  std::function<std::vector<Tensor>(const Tensor& grad_out)> backward;
  bool double_differentiable = true;
};

bool grad_enabled();

/// Disables op recording in scope.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

/// Gradients of a scalar output with respect to `inputs`. With create_graph the
/// returned tensors carry history and can be differentiated again. Inputs the
/// output does not depend on receive zeros.
std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs, bool create_graph = false);

/// Accumulates d(loss)/d(leaf) into the .grad() of every trainable leaf reached.
void backward(const Tensor& loss);

// ------------------------------------------------------------------ ops
// Binary arithmetic broadcasts numpy-style.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor silu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor abs(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor pow_scalar(const Tensor& a, double p);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);

Tensor expand(const Tensor& a, const Shape& shape);
Tensor sum_to(const Tensor& a, const Shape& shape);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor reshape(const Tensor& a, const Shape& shape);

/// [m,k] x [k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// x [B,Ci,L], w [Co,Ci,K] -> [B,Co,(L+2p-K)/s+1]
Tensor conv1d(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad);
/// x [B,Ci,L], w [Ci,Co,K] -> [B,Co,(L-1)s-2p+K+output_padding]
Tensor conv_transpose1d(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad,
                        std::size_t output_padding = 0);
/// Gradient of conv1d w.r.t. its kernel: x [B,Ci,Lx], g [B,Co,Lg] -> [Co,Ci,K].
Tensor conv1d_weight_grad(const Tensor& x, const Tensor& g, std::size_t kernel, std::size_t stride,
                          std::size_t pad);

Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
/// Zero padding along one axis.
Tensor pad(const Tensor& a, std::size_t axis, std::size_t before, std::size_t after);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);

/// Fused group normalization of x [B,C,L] with per-channel affine gamma/beta [C].
/// First-order only.
Tensor group_norm(const Tensor& x, std::size_t groups, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

}  // namespace artifactgen::ad
