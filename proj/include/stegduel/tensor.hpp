#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "stegduel/errors.hpp"

namespace stegduel {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::vector<double> grad;  // empty until first accumulation
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;

  void accumulate(const std::vector<double>& g) {
    if (grad.empty()) grad.assign(data.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) grad[i] += g[i];
  }
  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
    return grad;
  }
};

inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

}  // namespace detail

/// RAII guard that disables graph recording on the current thread.
class NoGradGuard {
 public:
  NoGradGuard() : prev_(detail::grad_mode()) { detail::grad_mode() = false; }
  ~NoGradGuard() { detail::grad_mode() = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

/// Dense n-d array of 64-bit reals with an optional gradient slot.
/// Copying a Tensor copies the handle; both refer to the same node.
class Tensor {
 public:
  Tensor() : node_(std::make_shared<detail::Node>()) {}

  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false) {
    if (shape_numel(shape) != data.size())
      throw DimensionError("tensor: shape " + shape_str(shape) + " does not match " +
                           std::to_string(data.size()) + " values");
    Tensor t;
    t.node_->shape = std::move(shape);
    t.node_->data = std::move(data);
    t.node_->requires_grad = requires_grad;
    return t;
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    const std::size_t n = shape_numel(shape);
    return from_data(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor full(Shape shape, double value, bool requires_grad = false) {
    const std::size_t n = shape_numel(shape);
    return from_data(std::move(shape), std::vector<double>(n, value), requires_grad);
  }

  static Tensor scalar(double value, bool requires_grad = false) {
    return from_data({1}, {value}, requires_grad);
  }

  const Shape& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->data.size(); }
  const std::vector<double>& data() const { return node_->data; }
  std::vector<double>& mutable_data() { return node_->data; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }

  /// Gradient accumulated by backward(); empty when never touched.
  const std::vector<double>& grad() const { return node_->grad; }
  void zero_grad() { node_->grad.clear(); }

  double item() const {
    if (numel() != 1)
      throw ContractError("item: tensor has " + std::to_string(numel()) +
                          " elements, expected scalar");
    return node_->data[0];
  }

  /// Value copy detached from any graph.
  Tensor detach() const { return from_data(node_->shape, node_->data, false); }

  std::shared_ptr<detail::Node> node() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

namespace detail {

inline void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v)
    if (!std::isfinite(x))
      throw OverflowError(std::string(op) + ": non-finite value in result");
}

/// Assemble an op result: runs the finite check and, when recording is on and
/// any input requires grad, wires the graph edge.
inline Tensor make_result(Shape shape, std::vector<double> data,
                          const std::vector<Tensor>& inputs,
                          std::function<void(Node&)> backprop, const char* op) {
  check_finite(data, op);
  Tensor out = Tensor::from_data(std::move(shape), std::move(data));
  bool track = false;
  if (grad_mode())
    for (const Tensor& t : inputs)
      if (t.requires_grad()) track = true;
  if (track) {
    auto n = out.node();
    n->requires_grad = true;
    for (const Tensor& t : inputs)
      if (t.requires_grad()) n->parents.push_back(t.node());
    n->backprop = std::move(backprop);
  }
  return out;
}

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  const Shape &sa = a.shape(), &sb = b.shape();
  if (sa.size() != sb.size())
    throw DimensionError(std::string(op) + ": rank mismatch " + shape_str(sa) +
                         " vs " + shape_str(sb));
  for (std::size_t ax = 0; ax < sa.size(); ++ax)
    if (sa[ax] != sb[ax])
      throw DimensionError(std::string(op) + ": shape mismatch at axis " +
                           std::to_string(ax) + " (" + std::to_string(sa[ax]) +
                           " vs " + std::to_string(sb[ax]) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary ops. The only broadcasting allowed is scalar-tensor:
// a one-element operand combines with every element of the other side.
// ---------------------------------------------------------------------------

namespace detail {

template <class Fwd, class BackA, class BackB>
Tensor binary_elementwise(const Tensor& a, const Tensor& b, Fwd fwd, BackA dfda,
                          BackB dfdb, const char* op) {
  bool a_scalar = false, b_scalar = false;
  if (a.numel() == 1 && b.numel() == 1) {
    if (a.shape() != b.shape()) b_scalar = true;  // result takes a's shape
  } else if (a.numel() == 1) {
    a_scalar = true;
  } else if (b.numel() == 1) {
    b_scalar = true;
  }
  if (!a_scalar && !b_scalar) check_same_shape(a, b, op);
  const Tensor& big = a_scalar ? b : a;
  const std::size_t n = big.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a.data()[a_scalar ? 0 : i];
    const double y = b.data()[b_scalar ? 0 : i];
    out[i] = fwd(x, y);
  }
  auto an = a.node(), bn = b.node();
  auto back = [an, bn, a_scalar, b_scalar, dfda, dfdb](Node& self) {
    const std::size_t n = self.data.size();
    if (an->requires_grad) {
      auto& g = an->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        const double x = an->data[a_scalar ? 0 : i];
        const double y = bn->data[b_scalar ? 0 : i];
        g[a_scalar ? 0 : i] += self.grad[i] * dfda(x, y);
      }
    }
    if (bn->requires_grad) {
      auto& g = bn->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        const double x = an->data[a_scalar ? 0 : i];
        const double y = bn->data[b_scalar ? 0 : i];
        g[b_scalar ? 0 : i] += self.grad[i] * dfdb(x, y);
      }
    }
  };
  return make_result(big.shape(), std::move(out), {a, b}, std::move(back), op);
}

template <class Fwd, class Back>
Tensor unary_elementwise(const Tensor& x, Fwd fwd, Back dfdx, const char* op) {
  const std::size_t n = x.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(x.data()[i]);
  auto xn = x.node();
  auto back = [xn, dfdx](Node& self) {
    if (!xn->requires_grad) return;
    auto& g = xn->grad_buffer();
    for (std::size_t i = 0; i < self.data.size(); ++i)
      g[i] += self.grad[i] * dfdx(xn->data[i], self.data[i]);
  };
  return make_result(x.shape(), std::move(out), {x}, std::move(back), op);
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(
      a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; }, "add");
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(
      a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; }, "sub");
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(
      a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; },
      "mul_elementwise");
}

// ---------------------------------------------------------------------------
// Elementwise unary ops. Derivatives receive (input, output) so activations
// can reuse the forward value.
// ---------------------------------------------------------------------------

inline Tensor leaky_relu(const Tensor& x, double slope = 0.2) {
  return detail::unary_elementwise(
      x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; }, "leaky_relu");
}

inline Tensor tanh(const Tensor& x) {
  return detail::unary_elementwise(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; }, "tanh");
}

inline Tensor sigmoid(const Tensor& x) {
  auto stable = [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  };
  return detail::unary_elementwise(
      x, stable, [](double, double y) { return y * (1.0 - y); }, "sigmoid");
}

/// Elementwise clamp to [lo,hi]; gradient passes only strictly inside.
inline Tensor clamp(const Tensor& x, double lo, double hi) {
  if (!(lo <= hi)) throw ContractError("clamp: lo > hi");
  return detail::unary_elementwise(
      x, [lo, hi](double v) { return std::min(std::max(v, lo), hi); },
      [lo, hi](double v, double) { return (v > lo && v < hi) ? 1.0 : 0.0; },
      "clamp");
}

inline Tensor log(const Tensor& x) {
  return detail::unary_elementwise(
      x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; }, "log");
}

inline Tensor sqrt(const Tensor& x) {
  return detail::unary_elementwise(
      x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return 0.5 / y; }, "sqrt");
}

// ---------------------------------------------------------------------------
// Structural ops
// ---------------------------------------------------------------------------

inline Tensor reshape(const Tensor& x, Shape target) {
  if (shape_numel(target) != x.numel())
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(target) + " (element count differs)");
  auto xn = x.node();
  auto back = [xn](detail::Node& self) {
    if (xn->requires_grad) xn->accumulate(self.grad);
  };
  return detail::make_result(std::move(target), x.data(), {x}, std::move(back),
                             "reshape");
}

inline Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
  const Shape &sa = a.shape(), &sb = b.shape();
  if (sa.size() != sb.size() || axis >= sa.size())
    throw DimensionError("concat: rank mismatch or bad axis " + std::to_string(axis));
  for (std::size_t ax = 0; ax < sa.size(); ++ax)
    if (ax != axis && sa[ax] != sb[ax])
      throw DimensionError("concat: shape mismatch at axis " + std::to_string(ax) +
                           " (" + std::to_string(sa[ax]) + " vs " +
                           std::to_string(sb[ax]) + ")");
  Shape out_shape = sa;
  out_shape[axis] = sa[axis] + sb[axis];

  // Decompose as outer x axis x inner blocks.
  std::size_t outer = 1, inner = 1;
  for (std::size_t ax = 0; ax < axis; ++ax) outer *= sa[ax];
  for (std::size_t ax = axis + 1; ax < sa.size(); ++ax) inner *= sa[ax];
  const std::size_t na = sa[axis] * inner, nb = sb[axis] * inner;

  std::vector<double> out(shape_numel(out_shape));
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(a.data().begin() + o * na, na, out.begin() + o * (na + nb));
    std::copy_n(b.data().begin() + o * nb, nb, out.begin() + o * (na + nb) + na);
  }
  auto an = a.node(), bn = b.node();
  auto back = [an, bn, outer, na, nb](detail::Node& self) {
    for (std::size_t o = 0; o < outer; ++o) {
      if (an->requires_grad) {
        auto& g = an->grad_buffer();
        for (std::size_t i = 0; i < na; ++i)
          g[o * na + i] += self.grad[o * (na + nb) + i];
      }
      if (bn->requires_grad) {
        auto& g = bn->grad_buffer();
        for (std::size_t i = 0; i < nb; ++i)
          g[o * nb + i] += self.grad[o * (na + nb) + na + i];
      }
    }
  };
  return detail::make_result(std::move(out_shape), std::move(out), {a, b},
                             std::move(back), "concat");
}

inline Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  auto xn = x.node();
  auto back = [xn](detail::Node& self) {
    if (!xn->requires_grad) return;
    auto& g = xn->grad_buffer();
    for (double& gi : g) gi += self.grad[0];
  };
  return detail::make_result({1}, {acc}, {x}, std::move(back), "sum");
}

inline Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw ContractError("mean: empty tensor");
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  const double inv_n = 1.0 / static_cast<double>(x.numel());
  auto xn = x.node();
  auto back = [xn, inv_n](detail::Node& self) {
    if (!xn->requires_grad) return;
    auto& g = xn->grad_buffer();
    for (double& gi : g) gi += self.grad[0] * inv_n;
  };
  return detail::make_result({1}, {acc * inv_n}, {x}, std::move(back), "mean");
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

/// 2-d matrix product (M x K) . (K x N) -> (M x N).
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape &sa = a.shape(), &sb = b.shape();
  if (sa.size() != 2 || sb.size() != 2)
    throw DimensionError("matmul: operands must be rank 2, got " + shape_str(sa) +
                         " and " + shape_str(sb));
  if (sa[1] != sb[0])
    throw DimensionError("matmul: inner axis mismatch (" + std::to_string(sa[1]) +
                         " vs " + std::to_string(sb[0]) + ")");
  const std::size_t m = sa[0], k = sa[1], n = sb[1];
  std::vector<double> out(m * n, 0.0);
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = ad[i * k + kk];
      const double* brow = bd.data() + kk * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  auto an = a.node(), bn = b.node();
  auto back = [an, bn, m, k, n](detail::Node& self) {
    if (an->requires_grad) {
      auto& g = an->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double gv = self.grad[i * n + j];
          const double* brow = bn->data.data() + j;  // column j
          for (std::size_t kk = 0; kk < k; ++kk)
            g[i * k + kk] += gv * brow[kk * n];
        }
    }
    if (bn->requires_grad) {
      auto& g = bn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
          const double av = an->data[i * k + kk];
          for (std::size_t j = 0; j < n; ++j)
            g[kk * n + j] += av * self.grad[i * n + j];
        }
    }
  };
  return detail::make_result({m, n}, std::move(out), {a, b}, std::move(back),
                             "matmul");
}

/// Add a per-channel bias b (shape [C]) to x (shape [N,C,H,W]).
inline Tensor bias_add(const Tensor& x, const Tensor& b) {
  const Shape& sx = x.shape();
  if (sx.size() != 4)
    throw DimensionError("bias_add: input must be rank 4, got " + shape_str(sx));
  if (b.shape().size() != 1 || b.shape()[0] != sx[1])
    throw DimensionError("bias_add: bias shape " + shape_str(b.shape()) +
                         " does not match channel axis " + std::to_string(sx[1]));
  const std::size_t nb = sx[0], c = sx[1], hw = sx[2] * sx[3];
  std::vector<double> out(x.data());
  for (std::size_t n = 0; n < nb; ++n)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double bv = b.data()[ch];
      double* p = out.data() + (n * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) p[i] += bv;
    }
  auto xn = x.node(), bnode = b.node();
  auto back = [xn, bnode, nb, c, hw](detail::Node& self) {
    if (xn->requires_grad) xn->accumulate(self.grad);
    if (bnode->requires_grad) {
      auto& g = bnode->grad_buffer();
      for (std::size_t n = 0; n < nb; ++n)
        for (std::size_t ch = 0; ch < c; ++ch) {
          const double* p = self.grad.data() + (n * c + ch) * hw;
          double acc = 0.0;
          for (std::size_t i = 0; i < hw; ++i) acc += p[i];
          g[ch] += acc;
        }
    }
  };
  return detail::make_result(sx, std::move(out), {x, b}, std::move(back),
                             "bias_add");
}

// ---------------------------------------------------------------------------
// Convolution. Input [N,C,H,W], kernel [F,C,kh,kw]; direct correlation, no
// kernel flip. conv2d_transpose is the exact adjoint of conv2d with the same
// stride/pad, so <conv2d(x,k),y> == <x,conv2d_transpose(y,k)>.
// ---------------------------------------------------------------------------

namespace detail {

struct ConvDims {
  std::size_t n, c, h, w, f, kh, kw, oh, ow;
  long stride, pad;
};

inline ConvDims conv_check(const Tensor& input, const Tensor& kernel, int stride,
                           int pad, const char* op) {
  const Shape &si = input.shape(), &sk = kernel.shape();
  if (si.size() != 4)
    throw DimensionError(std::string(op) + ": input must be rank 4, got " +
                         shape_str(si));
  if (sk.size() != 4)
    throw DimensionError(std::string(op) + ": kernel must be rank 4, got " +
                         shape_str(sk));
  if (stride < 1) throw ContractError(std::string(op) + ": stride must be >= 1");
  if (pad < 0) throw ContractError(std::string(op) + ": pad must be >= 0");
  ConvDims d{};
  d.n = si[0];
  d.c = si[1];
  d.h = si[2];
  d.w = si[3];
  d.f = sk[0];
  d.kh = sk[2];
  d.kw = sk[3];
  d.stride = stride;
  d.pad = pad;
  return d;
}

}  // namespace detail

inline Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride = 1,
                     int pad = 0) {
  auto d = detail::conv_check(input, kernel, stride, pad, "conv2d");
  if (kernel.shape()[1] != d.c)
    throw DimensionError("conv2d: kernel channel axis (" +
                         std::to_string(kernel.shape()[1]) + ") != input channels (" +
                         std::to_string(d.c) + ")");
  const long padded_h = static_cast<long>(d.h) + 2 * d.pad;
  const long padded_w = static_cast<long>(d.w) + 2 * d.pad;
  if (padded_h < static_cast<long>(d.kh) || padded_w < static_cast<long>(d.kw))
    throw DimensionError("conv2d: kernel " + shape_str(kernel.shape()) +
                         " larger than padded input " + shape_str(input.shape()));
  d.oh = static_cast<std::size_t>((padded_h - static_cast<long>(d.kh)) / d.stride + 1);
  d.ow = static_cast<std::size_t>((padded_w - static_cast<long>(d.kw)) / d.stride + 1);

  std::vector<double> out(d.n * d.f * d.oh * d.ow, 0.0);
  const auto& in = input.data();
  const auto& kd = kernel.data();
  for (std::size_t n = 0; n < d.n; ++n)
    for (std::size_t f = 0; f < d.f; ++f)
      for (std::size_t oy = 0; oy < d.oh; ++oy)
        for (std::size_t ox = 0; ox < d.ow; ++ox) {
          double acc = 0.0;
          for (std::size_t c = 0; c < d.c; ++c)
            for (std::size_t u = 0; u < d.kh; ++u) {
              const long iy = static_cast<long>(oy) * d.stride - d.pad +
                              static_cast<long>(u);
              if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
              const double* irow = in.data() + ((n * d.c + c) * d.h + iy) * d.w;
              const double* krow = kd.data() + ((f * d.c + c) * d.kh + u) * d.kw;
              for (std::size_t v = 0; v < d.kw; ++v) {
                const long ix = static_cast<long>(ox) * d.stride - d.pad +
                                static_cast<long>(v);
                if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
                acc += irow[ix] * krow[v];
              }
            }
          out[((n * d.f + f) * d.oh + oy) * d.ow + ox] = acc;
        }

  auto in_node = input.node(), k_node = kernel.node();
  auto back = [in_node, k_node, d](detail::Node& self) {
    const auto& g = self.grad;
    if (in_node->requires_grad) {
      auto& gi = in_node->grad_buffer();
      for (std::size_t n = 0; n < d.n; ++n)
        for (std::size_t f = 0; f < d.f; ++f)
          for (std::size_t oy = 0; oy < d.oh; ++oy)
            for (std::size_t ox = 0; ox < d.ow; ++ox) {
              const double gv = g[((n * d.f + f) * d.oh + oy) * d.ow + ox];
              for (std::size_t c = 0; c < d.c; ++c)
                for (std::size_t u = 0; u < d.kh; ++u) {
                  const long iy = static_cast<long>(oy) * d.stride - d.pad +
                                  static_cast<long>(u);
                  if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
                  for (std::size_t v = 0; v < d.kw; ++v) {
                    const long ix = static_cast<long>(ox) * d.stride - d.pad +
                                    static_cast<long>(v);
                    if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
                    gi[((n * d.c + c) * d.h + iy) * d.w + ix] +=
                        gv * k_node->data[((f * d.c + c) * d.kh + u) * d.kw + v];
                  }
                }
            }
    }
    if (k_node->requires_grad) {
      auto& gk = k_node->grad_buffer();
      for (std::size_t n = 0; n < d.n; ++n)
        for (std::size_t f = 0; f < d.f; ++f)
          for (std::size_t oy = 0; oy < d.oh; ++oy)
            for (std::size_t ox = 0; ox < d.ow; ++ox) {
              const double gv = g[((n * d.f + f) * d.oh + oy) * d.ow + ox];
              for (std::size_t c = 0; c < d.c; ++c)
                for (std::size_t u = 0; u < d.kh; ++u) {
                  const long iy = static_cast<long>(oy) * d.stride - d.pad +
                                  static_cast<long>(u);
                  if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
                  for (std::size_t v = 0; v < d.kw; ++v) {
                    const long ix = static_cast<long>(ox) * d.stride - d.pad +
                                    static_cast<long>(v);
                    if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
                    gk[((f * d.c + c) * d.kh + u) * d.kw + v] +=
                        gv * in_node->data[((n * d.c + c) * d.h + iy) * d.w + ix];
                  }
                }
            }
    }
  };
  return detail::make_result({d.n, d.f, d.oh, d.ow}, std::move(out),
                             {input, kernel}, std::move(back), "conv2d");
}

/// Adjoint of conv2d: input [N,F,H,W] with kernel [F,C,kh,kw] scatters to
/// [N,C,(H-1)*stride+kh-2*pad,(W-1)*stride+kw-2*pad].
inline Tensor conv2d_transpose(const Tensor& input, const Tensor& kernel,
                               int stride = 1, int pad = 0) {
  auto d = detail::conv_check(input, kernel, stride, pad, "conv2d_transpose");
  if (kernel.shape()[0] != d.c)
    throw DimensionError("conv2d_transpose: kernel filter axis (" +
                         std::to_string(kernel.shape()[0]) +
                         ") != input channels (" + std::to_string(d.c) + ")");
  const std::size_t cout = kernel.shape()[1];
  const long oh = (static_cast<long>(d.h) - 1) * d.stride +
                  static_cast<long>(d.kh) - 2 * d.pad;
  const long ow = (static_cast<long>(d.w) - 1) * d.stride +
                  static_cast<long>(d.kw) - 2 * d.pad;
  if (oh < 1 || ow < 1)
    throw DimensionError("conv2d_transpose: output would be empty for input " +
                         shape_str(input.shape()) + " and kernel " +
                         shape_str(kernel.shape()));
  d.oh = static_cast<std::size_t>(oh);
  d.ow = static_cast<std::size_t>(ow);
  d.f = d.c;       // input channel count (indexes kernel axis 0)
  d.c = cout;      // output channel count (kernel axis 1)

  std::vector<double> out(d.n * d.c * d.oh * d.ow, 0.0);
  const auto& in = input.data();
  const auto& kd = kernel.data();
  for (std::size_t n = 0; n < d.n; ++n)
    for (std::size_t f = 0; f < d.f; ++f)
      for (std::size_t iy = 0; iy < d.h; ++iy)
        for (std::size_t ix = 0; ix < d.w; ++ix) {
          const double xv = in[((n * d.f + f) * d.h + iy) * d.w + ix];
          for (std::size_t c = 0; c < d.c; ++c)
            for (std::size_t u = 0; u < d.kh; ++u) {
              const long ty = static_cast<long>(iy) * d.stride - d.pad +
                              static_cast<long>(u);
              if (ty < 0 || ty >= static_cast<long>(d.oh)) continue;
              double* orow = out.data() + ((n * d.c + c) * d.oh + ty) * d.ow;
              const double* krow = kd.data() + ((f * d.c + c) * d.kh + u) * d.kw;
              for (std::size_t v = 0; v < d.kw; ++v) {
                const long tx = static_cast<long>(ix) * d.stride - d.pad +
                                static_cast<long>(v);
                if (tx < 0 || tx >= static_cast<long>(d.ow)) continue;
                orow[tx] += xv * krow[v];
              }
            }
        }

  auto in_node = input.node(), k_node = kernel.node();
  auto back = [in_node, k_node, d](detail::Node& self) {
    const auto& g = self.grad;
    if (in_node->requires_grad) {
      auto& gi = in_node->grad_buffer();
      for (std::size_t n = 0; n < d.n; ++n)
        for (std::size_t f = 0; f < d.f; ++f)
          for (std::size_t iy = 0; iy < d.h; ++iy)
            for (std::size_t ix = 0; ix < d.w; ++ix) {
              double acc = 0.0;
              for (std::size_t c = 0; c < d.c; ++c)
                for (std::size_t u = 0; u < d.kh; ++u) {
                  const long ty = static_cast<long>(iy) * d.stride - d.pad +
                                  static_cast<long>(u);
                  if (ty < 0 || ty >= static_cast<long>(d.oh)) continue;
                  for (std::size_t v = 0; v < d.kw; ++v) {
                    const long tx = static_cast<long>(ix) * d.stride - d.pad +
                                    static_cast<long>(v);
                    if (tx < 0 || tx >= static_cast<long>(d.ow)) continue;
                    acc += g[((n * d.c + c) * d.oh + ty) * d.ow + tx] *
                           k_node->data[((f * d.c + c) * d.kh + u) * d.kw + v];
                  }
                }
              gi[((n * d.f + f) * d.h + iy) * d.w + ix] += acc;
            }
    }
    if (k_node->requires_grad) {
      auto& gk = k_node->grad_buffer();
      for (std::size_t n = 0; n < d.n; ++n)
        for (std::size_t f = 0; f < d.f; ++f)
          for (std::size_t iy = 0; iy < d.h; ++iy)
            for (std::size_t ix = 0; ix < d.w; ++ix) {
              const double xv = in_node->data[((n * d.f + f) * d.h + iy) * d.w + ix];
              for (std::size_t c = 0; c < d.c; ++c)
                for (std::size_t u = 0; u < d.kh; ++u) {
                  const long ty = static_cast<long>(iy) * d.stride - d.pad +
                                  static_cast<long>(u);
                  if (ty < 0 || ty >= static_cast<long>(d.oh)) continue;
                  for (std::size_t v = 0; v < d.kw; ++v) {
                    const long tx = static_cast<long>(ix) * d.stride - d.pad +
                                    static_cast<long>(v);
                    if (tx < 0 || tx >= static_cast<long>(d.ow)) continue;
                    gk[((f * d.c + c) * d.kh + u) * d.kw + v] +=
                        xv * g[((n * d.c + c) * d.oh + ty) * d.ow + tx];
                  }
                }
            }
    }
  };
  return detail::make_result({d.n, d.c, d.oh, d.ow}, std::move(out),
                             {input, kernel}, std::move(back), "conv2d_transpose");
}

// ---------------------------------------------------------------------------
// Reverse-mode sweep
// ---------------------------------------------------------------------------

/// Backpropagate from a scalar loss; accumulates into .grad of every
/// requires_grad tensor in the loss's graph. Tensors outside it are untouched.
inline void backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw ContractError("backward: loss must be scalar, got shape " +
                        shape_str(loss.shape()));
  if (!loss.requires_grad())
    throw ContractError("backward: loss is not attached to a graph");

  // Iterative post-order DFS; children appear after all their parents when
  // the order is reversed.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backprop && !node->grad.empty()) node->backprop(*node);
  }
}

// ---------------------------------------------------------------------------
// Uniform primitive dispatch (used by the gradient self-check and the CLI).
// ---------------------------------------------------------------------------

enum class OpKind {
  add,
  sub,
  mul_elementwise,
  matmul,
  reshape,
  concat,
  mean,
  sum,
  leaky_relu,
  tanh,
  sigmoid,
  clamp,
  log,
  sqrt,
  bias_add,
  conv2d,
  conv2d_transpose,
};

struct OpAttrs {
  double slope = 0.2;             // leaky_relu
  double lo = 0.0, hi = 1.0;      // clamp
  std::size_t axis = 0;           // concat
  Shape target_shape;             // reshape
  int stride = 1, pad = 0;        // conv2d / conv2d_transpose
};

inline const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul_elementwise: return "mul_elementwise";
    case OpKind::matmul: return "matmul";
    case OpKind::reshape: return "reshape";
    case OpKind::concat: return "concat";
    case OpKind::mean: return "mean";
    case OpKind::sum: return "sum";
    case OpKind::leaky_relu: return "leaky_relu";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::clamp: return "clamp";
    case OpKind::log: return "log";
    case OpKind::sqrt: return "sqrt";
    case OpKind::bias_add: return "bias_add";
    case OpKind::conv2d: return "conv2d";
    case OpKind::conv2d_transpose: return "conv2d_transpose";
  }
  return "?";
}

inline Tensor forward_primitive(OpKind kind, const std::vector<Tensor>& inputs,
                                const OpAttrs& attrs = {}) {
  auto need = [&](std::size_t n) {
    if (inputs.size() != n)
      throw ContractError(std::string(op_kind_name(kind)) + ": expected " +
                          std::to_string(n) + " inputs, got " +
                          std::to_string(inputs.size()));
  };
  switch (kind) {
    case OpKind::add: need(2); return add(inputs[0], inputs[1]);
    case OpKind::sub: need(2); return sub(inputs[0], inputs[1]);
    case OpKind::mul_elementwise: need(2); return mul(inputs[0], inputs[1]);
    case OpKind::matmul: need(2); return matmul(inputs[0], inputs[1]);
    case OpKind::reshape: need(1); return reshape(inputs[0], attrs.target_shape);
    case OpKind::concat: need(2); return concat(inputs[0], inputs[1], attrs.axis);
    case OpKind::mean: need(1); return mean(inputs[0]);
    case OpKind::sum: need(1); return sum(inputs[0]);
    case OpKind::leaky_relu: need(1); return leaky_relu(inputs[0], attrs.slope);
    case OpKind::tanh: need(1); return tanh(inputs[0]);
    case OpKind::sigmoid: need(1); return sigmoid(inputs[0]);
    case OpKind::clamp: need(1); return clamp(inputs[0], attrs.lo, attrs.hi);
    case OpKind::log: need(1); return log(inputs[0]);
    case OpKind::sqrt: need(1); return sqrt(inputs[0]);
    case OpKind::bias_add: need(2); return bias_add(inputs[0], inputs[1]);
    case OpKind::conv2d:
      need(2);
      return conv2d(inputs[0], inputs[1], attrs.stride, attrs.pad);
    case OpKind::conv2d_transpose:
      need(2);
      return conv2d_transpose(inputs[0], inputs[1], attrs.stride, attrs.pad);
  }
  throw ContractError("forward_primitive: unknown op kind");
}

}  // namespace stegduel
