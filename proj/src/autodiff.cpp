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

#include "artifactgen/autodiff.hpp"

#include "artifactgen/error.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace artifactgen::ad {

namespace {

thread_local bool g_grad_enabled = true;

class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled) : prev_(g_grad_enabled) { g_grad_enabled = enabled; }
  ~GradModeGuard() { g_grad_enabled = prev_; }
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool prev_;
};

using BackwardFn = std::function<std::vector<Tensor>(const Tensor&)>;

Tensor make(Shape shape, std::vector<double> values, const char* name, std::vector<Tensor> inputs,
            BackwardFn fn, bool double_differentiable = true) {
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->values = std::move(values);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& in : inputs) any = any || in.requires_grad();
    if (any) {
      auto node = std::make_shared<Node>();
      node->name = name;
      node->inputs = std::move(inputs);
      node->backward = std::move(fn);
      node->double_differentiable = double_differentiable;
      impl->grad_fn = std::move(node);
    }
  }
  return Tensor(std::move(impl));
}

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  fail(ErrorKind::invalid_argument, std::string(op) + ": " + detail);
}

Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t da = i < r - a.size() ? 1 : a[i - (r - a.size())];
    const std::size_t db = i < r - b.size() ? 1 : b[i - (r - b.size())];
    if (da != db && da != 1 && db != 1) {
      shape_error(op, "cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    out[i] = std::max(da, db);
  }
  return out;
}

// Strides of `src` aligned to the rank of `dst`, zero on broadcast axes.
std::vector<std::size_t> broadcast_strides(const Shape& src, const Shape& dst) {
  const std::size_t r = dst.size();
  std::vector<std::size_t> strides(r, 0);
  std::size_t st = 1;
  for (std::size_t i = src.size(); i-- > 0;) {
    const std::size_t di = i + (r - src.size());
    strides[di] = src[i] == 1 ? 0 : st;
    st *= src[i];
  }
  return strides;
}

// Calls fn(dst_flat, src_flat) for every element of dst.
template <typename Fn>
void for_each_broadcast(const Shape& src, const Shape& dst, Fn&& fn) {
  const auto strides = broadcast_strides(src, dst);
  const std::size_t r = dst.size();
  const std::size_t n = numel(dst);
  std::vector<std::size_t> idx(r, 0);
  std::size_t src_off = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fn(i, src_off);
    for (std::size_t d = r; d-- > 0;) {
      ++idx[d];
      src_off += strides[d];
      if (idx[d] < dst[d]) break;
      src_off -= strides[d] * idx[d];
      idx[d] = 0;
    }
  }
}

bool broadcastable_to(const Shape& src, const Shape& dst) {
  if (src.size() > dst.size()) return false;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::size_t s = src[src.size() - 1 - i];
    const std::size_t d = dst[dst.size() - 1 - i];
    if (s != d && s != 1) return false;
  }
  return true;
}

// [lo, hi) of t with 0 <= t*s + k - p < n, clipped to [0, tmax).
std::pair<std::size_t, std::size_t> tap_range(std::size_t k, std::size_t s, std::size_t p, std::size_t n,
                                              std::size_t tmax) {
  const auto kk = static_cast<long long>(k);
  const auto pp = static_cast<long long>(p);
  const auto ss = static_cast<long long>(s);
  const auto nn = static_cast<long long>(n);
  long long lo = pp > kk ? (pp - kk + ss - 1) / ss : 0;
  const long long num = nn - 1 + pp - kk;
  if (num < 0) return {0, 0};
  long long hi = std::min(num / ss + 1, static_cast<long long>(tmax));
  lo = std::min(lo, hi);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// Dense kernels used by the convolutions. Column matrices are laid out as
// [(channel, tap), (batch, position)] so one GEMM covers the whole batch.

// Single-threaded BLAS keeps results independent of the host's core count.
void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

// C[M,N] += A[M,K] * B[K,N]
void gemm_nn(std::size_t m, std::size_t n, std::size_t kd, const double* a, const double* b, double* c) {
  pin_blas_threads();
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(m), static_cast<int>(n),
              static_cast<int>(kd), 1.0, a, static_cast<int>(kd), b, static_cast<int>(n), 1.0, c, static_cast<int>(n));
}

// C[M,R] += A[M,N] * B[R,N]^T
void gemm_nt(std::size_t m, std::size_t r, std::size_t n, const double* a, const double* b, double* c) {
  pin_blas_threads();
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(m), static_cast<int>(r),
              static_cast<int>(n), 1.0, a, static_cast<int>(n), b, static_cast<int>(n), 1.0, c, static_cast<int>(r));
}

// x [B,C,L] -> col [(C,K), (B,T)] with col = x[b, c, t*s + k - p] (0 outside).
// Every entry is written, so the buffer skips value-initialization.
std::unique_ptr<double[]> im2col(std::span<const double> x, std::size_t nb, std::size_t cn, std::size_t len,
                                 std::size_t kn, std::size_t stride, std::size_t pad, std::size_t tout) {
  const std::size_t cols = nb * tout;
  std::unique_ptr<double[]> col(new double[cn * kn * cols]);
  for (std::size_t c = 0; c < cn; ++c) {
    for (std::size_t k = 0; k < kn; ++k) {
      const auto [lo, hi] = tap_range(k, stride, pad, len, tout);
      double* row = col.get() + (c * kn + k) * cols;
      for (std::size_t b = 0; b < nb; ++b) {
        const double* xr = x.data() + (b * cn + c) * len;
        double* dst = row + b * tout;
        std::fill(dst, dst + lo, 0.0);
        for (std::size_t t = lo; t < hi; ++t) dst[t] = xr[t * stride + k - pad];
        std::fill(dst + hi, dst + tout, 0.0);
      }
    }
  }
  return col;
}

// Adjoint of im2col: out[b, c, t*s + k - p] += col[(c,k), (b,t)].
void col2im(const std::vector<double>& col, std::size_t nb, std::size_t cn, std::size_t len, std::size_t kn,
            std::size_t stride, std::size_t pad, std::size_t tout, std::vector<double>& out) {
  const std::size_t cols = nb * tout;
  for (std::size_t c = 0; c < cn; ++c) {
    for (std::size_t k = 0; k < kn; ++k) {
      const auto [lo, hi] = tap_range(k, stride, pad, len, tout);
      const double* row = col.data() + (c * kn + k) * cols;
      for (std::size_t b = 0; b < nb; ++b) {
        double* yr = out.data() + (b * cn + c) * len;
        const double* src = row + b * tout;
        for (std::size_t t = lo; t < hi; ++t) yr[t * stride + k - pad] += src[t];
      }
    }
  }
}

// [B,C,T] <-> [C,(B,T)]
std::vector<double> to_channel_major(std::span<const double> x, std::size_t nb, std::size_t cn, std::size_t len) {
  std::vector<double> out(x.size());
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t c = 0; c < cn; ++c)
      std::copy_n(x.data() + (b * cn + c) * len, len, out.data() + c * nb * len + b * len);
  return out;
}

std::vector<double> from_channel_major(const std::vector<double>& x, std::size_t nb, std::size_t cn, std::size_t len) {
  std::vector<double> out(x.size());
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t c = 0; c < cn; ++c)
      std::copy_n(x.data() + c * nb * len + b * len, len, out.data() + (b * cn + c) * len);
  return out;
}


template <typename F>
Tensor unary(const Tensor& a, const char* name, F&& f, BackwardFn fn, bool dd = true) {
  std::vector<double> out(a.size());
  auto v = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(v[i]);
  return make(a.shape(), std::move(out), name, {a}, std::move(fn), dd);
}

Tensor constant_like(const Tensor& a, std::vector<double> values) { return Tensor::from(a.shape(), std::move(values)); }

}  // namespace

// ------------------------------------------------------------------ Tensor

std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
  const std::size_t n = numel(shape);
  return from(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::from(Shape shape, std::vector<double> values) {
  if (numel(shape) != values.size()) {
    shape_error("Tensor::from", "shape " + shape_str(shape) + " needs " + std::to_string(numel(shape)) +
                                    " values, got " + std::to_string(values.size()));
  }
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->values = std::move(values);
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value) { return from({}, {value}); }

double Tensor::item() const {
  require(size() == 1, ErrorKind::invalid_argument, "item(): tensor has " + std::to_string(size()) + " elements");
  return impl_->values[0];
}

bool Tensor::requires_grad() const { return impl_ && (impl_->leaf_requires_grad || impl_->grad_fn); }

Tensor& Tensor::set_requires_grad(bool flag) {
  require(is_leaf(), ErrorKind::invalid_argument, "set_requires_grad: only leaves can be flagged");
  impl_->leaf_requires_grad = flag;
  return *this;
}

Tensor Tensor::detach() const { return from(shape(), impl_->values); }
Tensor Tensor::clone() const { return detach(); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

// ------------------------------------------------------------------ engine

namespace {

std::unordered_map<TensorImpl*, Tensor> run_backward(const Tensor& output, bool create_graph) {
  require(output.defined() && output.size() == 1, ErrorKind::invalid_argument,
          "backward: loss must be a scalar, got shape " + (output.defined() ? shape_str(output.shape()) : "<none>"));

  // Topological order (inputs before consumers) by iterative DFS.
  std::vector<Tensor> order;
  std::unordered_set<TensorImpl*> visited;
  std::vector<std::pair<Tensor, std::size_t>> stack;
  stack.emplace_back(output, 0);
  visited.insert(output.impl());
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    const auto& fn = t.grad_fn();
    if (fn && next < fn->inputs.size()) {
      const Tensor child = fn->inputs[next++];
      if (child.requires_grad() && visited.insert(child.impl()).second) stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  GradModeGuard mode(create_graph);
  std::unordered_map<TensorImpl*, Tensor> grads;
  grads.emplace(output.impl(), Tensor::full(output.shape(), 1.0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Tensor& t = *it;
    const auto& fn = t.grad_fn();
    if (!fn) continue;
    auto g = grads.find(t.impl());
    if (g == grads.end()) continue;
    if (create_graph && !fn->double_differentiable) {
      fail(ErrorKind::invalid_argument,
           "op '" + fn->name + "' does not support double backward (not allowed inside a gradient penalty)");
    }
    const Tensor gout = g->second;
    std::vector<Tensor> gin = fn->backward(gout);
    for (std::size_t i = 0; i < gin.size() && i < fn->inputs.size(); ++i) {
      const Tensor& in = fn->inputs[i];
      if (!gin[i].defined() || !in.requires_grad()) continue;
      if (gin[i].shape() != in.shape()) {
        fail(ErrorKind::internal, "backward of '" + fn->name + "' produced gradient " + shape_str(gin[i].shape()) +
                                      " for input " + shape_str(in.shape()));
      }
      auto [slot, inserted] = grads.emplace(in.impl(), gin[i]);
      if (!inserted) slot->second = add(slot->second, gin[i]);
    }
    if (!create_graph) grads.erase(t.impl());
  }
  return grads;
}

}  // namespace

std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs, bool create_graph) {
  auto grads = run_backward(output, create_graph);
  std::vector<Tensor> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    auto it = grads.find(in.impl());
    out.push_back(it != grads.end() ? it->second : Tensor::zeros(in.shape()));
  }
  return out;
}

void backward(const Tensor& loss) {
  auto grads = run_backward(loss, false);
  for (auto& [impl, g] : grads) {
    if (!impl->leaf_requires_grad || impl->grad_fn) continue;
    if (impl->grad.size() != impl->values.size()) impl->grad.assign(impl->values.size(), 0.0);
    auto gv = g.values();
    for (std::size_t i = 0; i < gv.size(); ++i) impl->grad[i] += gv[i];
  }
}

// ------------------------------------------------------------------ shape ops

Tensor expand(const Tensor& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  if (!broadcastable_to(a.shape(), shape)) {
    shape_error("expand", "cannot expand " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(numel(shape));
  auto v = a.values();
  for_each_broadcast(a.shape(), shape, [&](std::size_t d, std::size_t s) { out[d] = v[s]; });
  const Shape in_shape = a.shape();
  return make(shape, std::move(out), "expand", {a},
              [in_shape](const Tensor& g) { return std::vector<Tensor>{sum_to(g, in_shape)}; });
}

Tensor sum_to(const Tensor& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  if (!broadcastable_to(shape, a.shape())) {
    shape_error("sum_to", "cannot reduce " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(numel(shape), 0.0);
  auto v = a.values();
  for_each_broadcast(shape, a.shape(), [&](std::size_t d, std::size_t s) { out[s] += v[d]; });
  const Shape in_shape = a.shape();
  return make(shape, std::move(out), "sum_to", {a},
              [in_shape](const Tensor& g) { return std::vector<Tensor>{expand(g, in_shape)}; });
}

Tensor sum(const Tensor& a) { return sum_to(a, Shape{}); }

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor reshape(const Tensor& a, const Shape& shape) {
  if (numel(shape) != a.size()) {
    shape_error("reshape", "cannot reshape " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  const Shape in_shape = a.shape();
  return make(shape, std::move(out), "reshape", {a},
              [in_shape](const Tensor& g) { return std::vector<Tensor>{reshape(g, in_shape)}; });
}

// ------------------------------------------------------------------ arithmetic

namespace {

template <typename F>
Tensor binary_same(const Tensor& a, const Tensor& b, const char* name, F&& f, BackwardFn fn) {
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
  return make(a.shape(), std::move(out), name, {a, b}, std::move(fn));
}

}  // namespace

Tensor add(const Tensor& a0, const Tensor& b0) {
  const Shape s = broadcast_shape(a0.shape(), b0.shape(), "add");
  const Tensor a = expand(a0, s);
  const Tensor b = expand(b0, s);
  return binary_same(a, b, "add", std::plus<>(), [](const Tensor& g) { return std::vector<Tensor>{g, g}; });
}

Tensor sub(const Tensor& a0, const Tensor& b0) {
  const Shape s = broadcast_shape(a0.shape(), b0.shape(), "sub");
  const Tensor a = expand(a0, s);
  const Tensor b = expand(b0, s);
  return binary_same(a, b, "sub", std::minus<>(),
                     [](const Tensor& g) { return std::vector<Tensor>{g, neg(g)}; });
}

Tensor mul(const Tensor& a0, const Tensor& b0) {
  const Shape s = broadcast_shape(a0.shape(), b0.shape(), "mul");
  const Tensor a = expand(a0, s);
  const Tensor b = expand(b0, s);
  return binary_same(a, b, "mul", std::multiplies<>(), [a, b](const Tensor& g) {
    return std::vector<Tensor>{a.requires_grad() ? mul(g, b) : Tensor(), b.requires_grad() ? mul(g, a) : Tensor()};
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, "scale", [s](double x) { return s * x; },
               [s](const Tensor& g) { return std::vector<Tensor>{scale(g, s)}; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, "add_scalar", [s](double x) { return x + s; },
               [](const Tensor& g) { return std::vector<Tensor>{g}; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor square(const Tensor& a) { return mul(a, a); }

Tensor tanh(const Tensor& a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); }, [a](const Tensor& g) {
    const Tensor y = tanh(a);
    return std::vector<Tensor>{mul(g, add_scalar(neg(square(y)), 1.0))};
  });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, [a](const Tensor& g) {
    const Tensor s = sigmoid(a);
    return std::vector<Tensor>{mul(g, mul(s, add_scalar(neg(s), 1.0)))};
  });
}

Tensor silu(const Tensor& a) { return mul(a, sigmoid(a)); }

Tensor leaky_relu(const Tensor& a, double slope) {
  // Piecewise linear: the backward multiplies by a constant mask, whose own
  // derivative is zero almost everywhere.
  return unary(a, "leaky_relu", [slope](double x) { return x > 0.0 ? x : slope * x; }, [a, slope](const Tensor& g) {
    std::vector<double> mask(a.size());
    auto v = a.values();
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = v[i] > 0.0 ? 1.0 : slope;
    return std::vector<Tensor>{mul(g, constant_like(a, std::move(mask)))};
  });
}

Tensor abs(const Tensor& a) {
  return unary(a, "abs", [](double x) { return std::fabs(x); }, [a](const Tensor& g) {
    std::vector<double> sign(a.size());
    auto v = a.values();
    for (std::size_t i = 0; i < sign.size(); ++i) sign[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    return std::vector<Tensor>{mul(g, constant_like(a, std::move(sign)))};
  });
}

Tensor exp(const Tensor& a) {
  return unary(a, "exp", [](double x) { return std::exp(x); },
               [a](const Tensor& g) { return std::vector<Tensor>{mul(g, exp(a))}; });
}

Tensor pow_scalar(const Tensor& a, double p) {
  return unary(a, "pow", [p](double x) { return std::pow(x, p); }, [a, p](const Tensor& g) {
    return std::vector<Tensor>{mul(g, scale(pow_scalar(a, p - 1.0), p))};
  });
}

Tensor sqrt(const Tensor& a) { return pow_scalar(a, 0.5); }

// ------------------------------------------------------------------ linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    shape_error("matmul", "incompatible shapes " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = av[i * k + kk];
      if (aik == 0.0) continue;
      const double* brow = bv.data() + kk * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return make({m, n}, std::move(out), "matmul", {a, b}, [a, b](const Tensor& g) {
    return std::vector<Tensor>{a.requires_grad() ? matmul(g, transpose(b)) : Tensor(),
                               b.requires_grad() ? matmul(transpose(a), g) : Tensor()};
  });
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) shape_error("transpose", "expected rank 2, got " + shape_str(a.shape()));
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> out(m * n);
  auto v = a.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = v[i * n + j];
  }
  return make({n, m}, std::move(out), "transpose", {a},
              [](const Tensor& g) { return std::vector<Tensor>{transpose(g)}; });
}

// ------------------------------------------------------------------ convolution

Tensor conv1d(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad) {
  if (x.rank() != 3 || w.rank() != 3 || x.dim(1) != w.dim(1) || stride == 0) {
    shape_error("conv1d", "input " + shape_str(x.shape()) + " incompatible with kernel " + shape_str(w.shape()));
  }
  const std::size_t nb = x.dim(0), ci_n = x.dim(1), lin = x.dim(2);
  const std::size_t co_n = w.dim(0), kn = w.dim(2);
  if (lin + 2 * pad < kn) shape_error("conv1d", "kernel " + std::to_string(kn) + " longer than padded input");
  const std::size_t lout = (lin + 2 * pad - kn) / stride + 1;
  const auto col = im2col(x.values(), nb, ci_n, lin, kn, stride, pad, lout);
  std::vector<double> ym(co_n * nb * lout, 0.0);
  gemm_nn(co_n, nb * lout, ci_n * kn, w.values().data(), col.get(), ym.data());
  std::vector<double> out = from_channel_major(ym, nb, co_n, lout);
  return make({nb, co_n, lout}, std::move(out), "conv1d", {x, w}, [x, w, stride, pad, lin, lout, kn](const Tensor& g) {
    Tensor dx, dw;
    if (x.requires_grad()) {
      const std::size_t base = (lout - 1) * stride + kn - 2 * pad;
      dx = conv_transpose1d(g, w, stride, pad, lin - base);
    }
    if (w.requires_grad()) dw = conv1d_weight_grad(x, g, kn, stride, pad);
    return std::vector<Tensor>{dx, dw};
  });
}

Tensor conv_transpose1d(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad,
                        std::size_t output_padding) {
  if (x.rank() != 3 || w.rank() != 3 || x.dim(1) != w.dim(0) || stride == 0) {
    shape_error("conv_transpose1d",
                "input " + shape_str(x.shape()) + " incompatible with kernel " + shape_str(w.shape()));
  }
  const std::size_t nb = x.dim(0), ci_n = x.dim(1), lin = x.dim(2);
  const std::size_t co_n = w.dim(1), kn = w.dim(2);
  const long long lout_ll = static_cast<long long>((lin - 1) * stride + kn + output_padding) - 2LL * static_cast<long long>(pad);
  if (lout_ll <= 0 || output_padding >= stride) {
    shape_error("conv_transpose1d", "invalid output length for input " + shape_str(x.shape()));
  }
  const auto lout = static_cast<std::size_t>(lout_ll);
  // w viewed as [Ci, (Co,K)]; col = w^T x, then scatter the taps.
  std::vector<double> wt(co_n * kn * ci_n);
  auto wv = w.values();
  for (std::size_t ci = 0; ci < ci_n; ++ci)
    for (std::size_t r = 0; r < co_n * kn; ++r) wt[r * ci_n + ci] = wv[ci * co_n * kn + r];
  const auto xm = to_channel_major(x.values(), nb, ci_n, lin);
  std::vector<double> col(co_n * kn * nb * lin, 0.0);
  gemm_nn(co_n * kn, nb * lin, ci_n, wt.data(), xm.data(), col.data());
  std::vector<double> out(nb * co_n * lout, 0.0);
  col2im(col, nb, co_n, lout, kn, stride, pad, lin, out);
  return make({nb, co_n, lout}, std::move(out), "conv_transpose1d", {x, w}, [x, w, stride, pad, kn](const Tensor& g) {
    Tensor dx, dw;
    if (x.requires_grad()) dx = conv1d(g, w, stride, pad);
    if (w.requires_grad()) dw = conv1d_weight_grad(g, x, kn, stride, pad);
    return std::vector<Tensor>{dx, dw};
  });
}

Tensor conv1d_weight_grad(const Tensor& x, const Tensor& g, std::size_t kernel, std::size_t stride, std::size_t pad) {
  if (x.rank() != 3 || g.rank() != 3 || x.dim(0) != g.dim(0) || stride == 0 || x.dim(2) + 2 * pad < kernel ||
      g.dim(2) != (x.dim(2) + 2 * pad - kernel) / stride + 1) {
    shape_error("conv1d_weight_grad", "input " + shape_str(x.shape()) + " and output gradient " +
                                          shape_str(g.shape()) + " are inconsistent");
  }
  const std::size_t nb = x.dim(0), ci_n = x.dim(1), lx = x.dim(2);
  const std::size_t co_n = g.dim(1), lg = g.dim(2);
  const auto col = im2col(x.values(), nb, ci_n, lx, kernel, stride, pad, lg);
  const auto gm = to_channel_major(g.values(), nb, co_n, lg);
  std::vector<double> out(co_n * ci_n * kernel, 0.0);
  gemm_nt(co_n, ci_n * kernel, nb * lg, gm.data(), col.get(), out.data());
  return make({co_n, ci_n, kernel}, std::move(out), "conv1d_weight_grad", {x, g},
              [x, g, stride, pad, kernel, lx, lg](const Tensor& gw) {
                Tensor dx, dg;
                if (x.requires_grad()) {
                  const std::size_t base = (lg - 1) * stride + kernel - 2 * pad;
                  dx = conv_transpose1d(g, gw, stride, pad, lx - base);
                }
                if (g.requires_grad()) dg = conv1d(x, gw, stride, pad);
                return std::vector<Tensor>{dx, dg};
              });
}

// ------------------------------------------------------------------ slicing

Tensor narrow(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  if (axis >= a.rank() || start + length > a.dim(axis)) {
    shape_error("narrow", "range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                              ") out of bounds for axis " + std::to_string(axis) + " of " + shape_str(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape os = s;
  os[axis] = length;
  std::vector<double> out(outer * length * inner);
  auto v = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(v.data() + (o * s[axis] + start) * inner, length * inner, out.data() + o * length * inner);
  }
  const std::size_t full = s[axis];
  return make(os, std::move(out), "narrow", {a}, [axis, start, length, full](const Tensor& g) {
    return std::vector<Tensor>{pad(g, axis, start, full - start - length)};
  });
}

Tensor pad(const Tensor& a, std::size_t axis, std::size_t before, std::size_t after) {
  if (axis >= a.rank()) shape_error("pad", "axis out of range for " + shape_str(a.shape()));
  if (before == 0 && after == 0) return a;
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape os = s;
  os[axis] = s[axis] + before + after;
  std::vector<double> out(numel(os), 0.0);
  auto v = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(v.data() + o * s[axis] * inner, s[axis] * inner, out.data() + (o * os[axis] + before) * inner);
  }
  const std::size_t len = s[axis];
  return make(os, std::move(out), "pad", {a}, [axis, before, len](const Tensor& g) {
    return std::vector<Tensor>{narrow(g, axis, before, len)};
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  require(!parts.empty(), ErrorKind::invalid_argument, "concat: no inputs");
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape a = p.shape(), b = parts.front().shape();
    if (axis >= a.size() || a.size() != b.size()) shape_error("concat", "rank mismatch");
    a[axis] = b[axis] = 0;
    if (a != b) shape_error("concat", shape_str(p.shape()) + " vs " + shape_str(parts.front().shape()));
    total += p.dim(axis);
  }
  Tensor out;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const Tensor padded = pad(p, axis, offset, total - offset - p.dim(axis));
    out = out.defined() ? add(out, padded) : padded;
    offset += p.dim(axis);
  }
  return out;
}

// ------------------------------------------------------------------ group norm

Tensor group_norm(const Tensor& x, std::size_t groups, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() != 3 || groups == 0 || x.dim(1) % groups != 0 || gamma.shape() != Shape{x.dim(1)} ||
      beta.shape() != Shape{x.dim(1)}) {
    shape_error("group_norm", "input " + shape_str(x.shape()) + " with " + std::to_string(groups) +
                                  " groups and affine " + shape_str(gamma.shape()));
  }
  const std::size_t nb = x.dim(0), nc = x.dim(1), len = x.dim(2);
  const std::size_t cg = nc / groups;
  const std::size_t gsize = cg * len;
  auto xv = x.values();
  auto gm = gamma.values();
  auto bt = beta.values();
  std::vector<double> xhat(x.size());
  std::vector<double> rstd(nb * groups);
  std::vector<double> out(x.size());
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t gi = 0; gi < groups; ++gi) {
      const std::size_t off = (b * nc + gi * cg) * len;
      double mu = 0.0;
      for (std::size_t i = 0; i < gsize; ++i) mu += xv[off + i];
      mu /= static_cast<double>(gsize);
      double var = 0.0;
      for (std::size_t i = 0; i < gsize; ++i) var += (xv[off + i] - mu) * (xv[off + i] - mu);
      var /= static_cast<double>(gsize);
      const double r = 1.0 / std::sqrt(var + eps);
      rstd[b * groups + gi] = r;
      for (std::size_t i = 0; i < gsize; ++i) {
        const std::size_t c = gi * cg + i / len;
        xhat[off + i] = (xv[off + i] - mu) * r;
        out[off + i] = xhat[off + i] * gm[c] + bt[c];
      }
    }
  }
  auto fn = [x, gamma, beta, groups, xhat = std::move(xhat), rstd = std::move(rstd)](const Tensor& g) {
    const std::size_t nb = x.dim(0), nc = x.dim(1), len = x.dim(2);
    const std::size_t cg = nc / groups;
    const std::size_t gsize = cg * len;
    auto gv = g.values();
    auto gm = gamma.values();
    std::vector<double> dx(x.size()), dgamma(nc, 0.0), dbeta(nc, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t gi = 0; gi < groups; ++gi) {
        const std::size_t off = (b * nc + gi * cg) * len;
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < gsize; ++i) {
          const std::size_t c = gi * cg + i / len;
          const double dxh = gv[off + i] * gm[c];
          m1 += dxh;
          m2 += dxh * xhat[off + i];
          dgamma[c] += gv[off + i] * xhat[off + i];
          dbeta[c] += gv[off + i];
        }
        m1 /= static_cast<double>(gsize);
        m2 /= static_cast<double>(gsize);
        const double r = rstd[b * groups + gi];
        for (std::size_t i = 0; i < gsize; ++i) {
          const std::size_t c = gi * cg + i / len;
          dx[off + i] = r * (gv[off + i] * gm[c] - m1 - xhat[off + i] * m2);
        }
      }
    }
    return std::vector<Tensor>{Tensor::from(x.shape(), std::move(dx)), Tensor::from(gamma.shape(), std::move(dgamma)),
                               Tensor::from(beta.shape(), std::move(dbeta))};
  };
  return make(x.shape(), std::move(out), "group_norm", {x, gamma, beta}, std::move(fn), false);
}

}  // namespace artifactgen::ad
