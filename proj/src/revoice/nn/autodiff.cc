// Copyright 2026  The revoice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "revoice/nn/autodiff.h"

#include <cmath>
#include <unordered_set>

#include "revoice/nn/gemm.h"

namespace revoice {
namespace nn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

Var make_node(Tensor value, std::vector<Var> parents,
              std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  bool rg = false;
  for (const Var& p : parents) rg = rg || p.node()->requires_grad;
  n->requires_grad = rg;
  n->parents.reserve(parents.size());
  for (const Var& p : parents) n->parents.push_back(p.node());
  if (rg) n->backprop = std::move(backprop);
  return Var(n);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(op) + ": " + a.shape_str() + " vs " + b.shape_str());
  }
}

void check_ndim(const Tensor& t, int nd, const char* op) {
  if (t.ndim() != nd) {
    throw ShapeMismatch(std::string(op) + ": expected " + std::to_string(nd) +
                        "-d tensor, got " + t.shape_str());
  }
}

// Accumulates g into p's grad if p participates in the tape.
void accum(Node& p, const Tensor& g) {
  if (!p.requires_grad) return;
  p.ensure_grad();
  for (int64_t i = 0; i < g.numel(); ++i) p.grad.flat(i) += g.flat(i);
}

}  // namespace

Var Var::leaf(Tensor value, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return Var(n);
}

void backward(const Var& loss) {
  if (!loss.defined() || loss.value().numel() != 1) {
    throw ShapeMismatch("backward requires a scalar loss");
  }
  // iterative post-order over the subgraph that requires grad
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* n;
    size_t next = 0;
  };
  std::vector<Frame> stack;
  Node* root = loss.node().get();
  if (!root->requires_grad) return;
  stack.push_back({root});
  visited.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      Node* p = f.n->parents[f.next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  root->ensure_grad();
  root->grad.flat(0) = 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop && n->grad.defined()) n->backprop(*n);
  }
}

// ---------------------------------------------------------------------------
// elementwise

Var add(const Var& a, const Var& b) {
  check_same_shape(a.value(), b.value(), "add");
  Tensor out(a.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.flat(i) = a.value().flat(i) + b.value().flat(i);
  return make_node(std::move(out), {a, b}, [](Node& n) {
    accum(*n.parents[0], n.grad);
    accum(*n.parents[1], n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a.value(), b.value(), "sub");
  Tensor out(a.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.flat(i) = a.value().flat(i) - b.value().flat(i);
  return make_node(std::move(out), {a, b}, [](Node& n) {
    accum(*n.parents[0], n.grad);
    Node& p = *n.parents[1];
    if (p.requires_grad) {
      p.ensure_grad();
      for (int64_t i = 0; i < n.grad.numel(); ++i) p.grad.flat(i) -= n.grad.flat(i);
    }
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a.value(), b.value(), "mul");
  Tensor out(a.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) out.flat(i) = a.value().flat(i) * b.value().flat(i);
  return make_node(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < n.grad.numel(); ++i) {
        pa.grad.flat(i) += n.grad.flat(i) * pb.value.flat(i);
      }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < n.grad.numel(); ++i) {
        pb.grad.flat(i) += n.grad.flat(i) * pa.value.flat(i);
      }
    }
  });
}

Var scale(const Var& a, double k) {
  Tensor out(a.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    out.flat(i) = static_cast<float>(k * a.value().flat(i));
  }
  return make_node(std::move(out), {a}, [k](Node& n) {
    Node& p = *n.parents[0];
    if (p.requires_grad) {
      p.ensure_grad();
      for (int64_t i = 0; i < n.grad.numel(); ++i) {
        p.grad.flat(i) += static_cast<float>(k * n.grad.flat(i));
      }
    }
  });
}

Var add_scalar(const Var& a, double k) {
  Tensor out(a.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    out.flat(i) = static_cast<float>(a.value().flat(i) + k);
  }
  return make_node(std::move(out), {a}, [](Node& n) { accum(*n.parents[0], n.grad); });
}

namespace {
// generic unary with derivative as a function of (x, y)
template <class F, class D>
Var unary_op(const Var& x, F f, D dfdx) {
  Tensor out(x.value().shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    out.flat(i) = static_cast<float>(f(static_cast<double>(x.value().flat(i))));
  }
  return make_node(std::move(out), {x}, [dfdx](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int64_t i = 0; i < n.grad.numel(); ++i) {
      const double xv = p.value.flat(i);
      const double yv = n.value.flat(i);
      p.grad.flat(i) += static_cast<float>(n.grad.flat(i) * dfdx(xv, yv));
    }
  });
}
}  // namespace

Var relu(const Var& x) {
  return unary_op(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
  return unary_op(
      x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Var gelu(const Var& x) {
  return unary_op(
      x,
      [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
        return cdf + v * pdf;
      });
}

Var silu(const Var& x) {
  return unary_op(
      x,
      [](double v) { return v / (1.0 + std::exp(-v)); },
      [](double v, double) {
        const double s = 1.0 / (1.0 + std::exp(-v));
        return s * (1.0 + v * (1.0 - s));
      });
}

Var tanh_act(const Var& x) {
  return unary_op(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

// ---------------------------------------------------------------------------
// matrix

Var matmul(const Var& a, const Var& b) {
  check_ndim(a.value(), 2, "matmul");
  check_ndim(b.value(), 2, "matmul");
  const int m = a.value().dim(0), k = a.value().dim(1);
  if (b.value().dim(0) != k) {
    throw ShapeMismatch("matmul: inner dims " + a.value().shape_str() + " x " +
                        b.value().shape_str());
  }
  const int n = b.value().dim(1);
  Tensor out({m, n});
  gemm(m, k, n, a.value().data(), b.value().data(), out.data(), false);
  return make_node(std::move(out), {a, b}, [m, k, n](Node& node) {
    Node& pa = *node.parents[0];
    Node& pb = *node.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      // dA += dC * B^T
      gemm_nt(m, n, k, node.grad.data(), pb.value.data(), pa.grad.data(), true);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      // dB += A^T * dC
      gemm_tn(k, m, n, pa.value.data(), node.grad.data(), pb.grad.data(), true);
    }
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  check_ndim(a.value(), 2, "matmul_nt");
  check_ndim(b.value(), 2, "matmul_nt");
  const int m = a.value().dim(0), k = a.value().dim(1);
  if (b.value().dim(1) != k) {
    throw ShapeMismatch("matmul_nt: inner dims " + a.value().shape_str() + " x " +
                        b.value().shape_str() + "^T");
  }
  const int n = b.value().dim(0);
  Tensor out({m, n});
  gemm_nt(m, k, n, a.value().data(), b.value().data(), out.data(), false);
  return make_node(std::move(out), {a, b}, [m, k, n](Node& node) {
    Node& pa = *node.parents[0];
    Node& pb = *node.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      // dA += dC * B   ([M,N] x [N,K])
      gemm(m, n, k, node.grad.data(), pb.value.data(), pa.grad.data(), true);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      // dB += dC^T * A ([N,M] x [M,K])
      gemm_tn(n, m, k, node.grad.data(), pa.value.data(), pb.grad.data(), true);
    }
  });
}

Var transpose2d(const Var& x) {
  check_ndim(x.value(), 2, "transpose2d");
  const int r = x.value().dim(0), c = x.value().dim(1);
  Tensor out({c, r});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at2(j, i) = x.value().at2(i, j);
  return make_node(std::move(out), {x}, [r, c](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) p.grad.at2(i, j) += n.grad.at2(j, i);
  });
}

Var reshape(const Var& x, std::vector<int> shape) {
  if (Tensor::count(shape) != x.value().numel()) {
    throw ShapeMismatch("reshape: element count mismatch");
  }
  Tensor out(shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.flat(i) = x.value().flat(i);
  return make_node(std::move(out), {x}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int64_t i = 0; i < n.grad.numel(); ++i) p.grad.flat(i) += n.grad.flat(i);
  });
}

// ---------------------------------------------------------------------------
// structure

Var concat_cols(const Var& a, const Var& b) {
  check_ndim(a.value(), 2, "concat_cols");
  check_ndim(b.value(), 2, "concat_cols");
  const int t = a.value().dim(0);
  if (b.value().dim(0) != t) throw ShapeMismatch("concat_cols: row mismatch");
  const int ca = a.value().dim(1), cb = b.value().dim(1);
  Tensor out({t, ca + cb});
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < ca; ++j) out.at2(i, j) = a.value().at2(i, j);
    for (int j = 0; j < cb; ++j) out.at2(i, ca + j) = b.value().at2(i, j);
  }
  return make_node(std::move(out), {a, b}, [t, ca, cb](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < ca; ++j) pa.grad.at2(i, j) += n.grad.at2(i, j);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < cb; ++j) pb.grad.at2(i, j) += n.grad.at2(i, ca + j);
    }
  });
}

Var slice_cols(const Var& x, int start, int len) {
  check_ndim(x.value(), 2, "slice_cols");
  const int t = x.value().dim(0), c = x.value().dim(1);
  if (start < 0 || len < 1 || start + len > c) {
    throw ShapeMismatch("slice_cols: bad range");
  }
  Tensor out({t, len});
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < len; ++j) out.at2(i, j) = x.value().at2(i, start + j);
  return make_node(std::move(out), {x}, [t, start, len](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < len; ++j) p.grad.at2(i, start + j) += n.grad.at2(i, j);
  });
}

Var concat_channels(const Var& a, const Var& b) {
  check_ndim(a.value(), 3, "concat_channels");
  check_ndim(b.value(), 3, "concat_channels");
  const int ca = a.value().dim(0), cb = b.value().dim(0);
  const int h = a.value().dim(1), w = a.value().dim(2);
  if (b.value().dim(1) != h || b.value().dim(2) != w) {
    throw ShapeMismatch("concat_channels: spatial mismatch");
  }
  Tensor out({ca + cb, h, w});
  const int64_t plane = static_cast<int64_t>(h) * w;
  for (int64_t i = 0; i < ca * plane; ++i) out.flat(i) = a.value().flat(i);
  for (int64_t i = 0; i < cb * plane; ++i) out.flat(ca * plane + i) = b.value().flat(i);
  return make_node(std::move(out), {a, b}, [ca, cb, plane](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int64_t i = 0; i < ca * plane; ++i) pa.grad.flat(i) += n.grad.flat(i);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int64_t i = 0; i < cb * plane; ++i) {
        pb.grad.flat(i) += n.grad.flat(ca * plane + i);
      }
    }
  });
}

Var pad2d_br(const Var& x, int pad_h, int pad_w) {
  check_ndim(x.value(), 3, "pad2d_br");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  Tensor out({c, h + pad_h, w + pad_w});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) out.at3(ch, i, j) = x.value().at3(ch, i, j);
  return make_node(std::move(out), {x}, [c, h, w](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) p.grad.at3(ch, i, j) += n.grad.at3(ch, i, j);
  });
}

Var crop2d_tl(const Var& x, int new_h, int new_w) {
  check_ndim(x.value(), 3, "crop2d_tl");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (new_h > h || new_w > w || new_h < 1 || new_w < 1) {
    throw ShapeMismatch("crop2d_tl: bad target size");
  }
  Tensor out({c, new_h, new_w});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < new_h; ++i)
      for (int j = 0; j < new_w; ++j) out.at3(ch, i, j) = x.value().at3(ch, i, j);
  return make_node(std::move(out), {x}, [c, new_h, new_w](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < new_h; ++i)
        for (int j = 0; j < new_w; ++j) p.grad.at3(ch, i, j) += n.grad.at3(ch, i, j);
  });
}

// ---------------------------------------------------------------------------
// normalization / softmax

namespace {
// Shared layer-norm backward over strided groups. Group g has n values at
// base(g) + i*stride.
struct NormGroupSpec {
  int64_t groups;
  int n;
  std::function<int64_t(int64_t)> base;
  int64_t stride;
};

Var layer_norm_impl(const Var& x, const Var& gamma, const Var& beta, double eps,
                    const NormGroupSpec spec) {
  Tensor out(x.value().shape());
  const int n = spec.n;
  for (int64_t g = 0; g < spec.groups; ++g) {
    const int64_t b0 = spec.base(g);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += x.value().flat(b0 + i * spec.stride);
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x.value().flat(b0 + i * spec.stride) - mean;
      var += d * d;
    }
    var /= n;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (int i = 0; i < n; ++i) {
      const double xh = (x.value().flat(b0 + i * spec.stride) - mean) * inv_std;
      out.flat(b0 + i * spec.stride) = static_cast<float>(
          xh * gamma.value().flat(i) + beta.value().flat(i));
    }
  }
  return make_node(std::move(out), {x, gamma, beta}, [eps, spec](Node& node) {
    Node& px = *node.parents[0];
    Node& pg = *node.parents[1];
    Node& pb = *node.parents[2];
    const int n = spec.n;
    if (px.requires_grad) px.ensure_grad();
    if (pg.requires_grad) pg.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t g = 0; g < spec.groups; ++g) {
      const int64_t b0 = spec.base(g);
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += px.value.flat(b0 + i * spec.stride);
      mean /= n;
      double var = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = px.value.flat(b0 + i * spec.stride) - mean;
        var += d * d;
      }
      var /= n;
      const double inv_std = 1.0 / std::sqrt(var + eps);
      double sum_gdy = 0.0, sum_gdy_xh = 0.0;
      for (int i = 0; i < n; ++i) {
        const double xh = (px.value.flat(b0 + i * spec.stride) - mean) * inv_std;
        const double dy = node.grad.flat(b0 + i * spec.stride);
        const double gdy = dy * pg.value.flat(i);
        sum_gdy += gdy;
        sum_gdy_xh += gdy * xh;
        if (pg.requires_grad) pg.grad.flat(i) += static_cast<float>(dy * xh);
        if (pb.requires_grad) pb.grad.flat(i) += static_cast<float>(dy);
      }
      if (px.requires_grad) {
        for (int i = 0; i < n; ++i) {
          const double xh = (px.value.flat(b0 + i * spec.stride) - mean) * inv_std;
          const double dy = node.grad.flat(b0 + i * spec.stride);
          const double gdy = dy * pg.value.flat(i);
          px.grad.flat(b0 + i * spec.stride) += static_cast<float>(
              (gdy - sum_gdy / n - xh * sum_gdy_xh / n) * inv_std);
        }
      }
    }
  });
}
}  // namespace

Var layer_norm_rows(const Var& x, const Var& gamma, const Var& beta, double eps) {
  check_ndim(x.value(), 2, "layer_norm_rows");
  const int t = x.value().dim(0), c = x.value().dim(1);
  if (gamma.value().numel() != c || beta.value().numel() != c) {
    throw ShapeMismatch("layer_norm_rows: affine params mismatch");
  }
  NormGroupSpec spec{t, c, [c](int64_t g) { return g * c; }, 1};
  return layer_norm_impl(x, gamma, beta, eps, spec);
}

Var layer_norm_channels(const Var& x, const Var& gamma, const Var& beta, double eps) {
  check_ndim(x.value(), 3, "layer_norm_channels");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (gamma.value().numel() != c || beta.value().numel() != c) {
    throw ShapeMismatch("layer_norm_channels: affine params mismatch");
  }
  const int64_t plane = static_cast<int64_t>(h) * w;
  NormGroupSpec spec{plane, c, [](int64_t g) { return g; }, plane};
  return layer_norm_impl(x, gamma, beta, eps, spec);
}

Var softmax_rows(const Var& x) {
  check_ndim(x.value(), 2, "softmax_rows");
  const int t = x.value().dim(0), c = x.value().dim(1);
  Tensor out({t, c});
  for (int i = 0; i < t; ++i) {
    double mx = -1e300;
    for (int j = 0; j < c; ++j) mx = std::max(mx, static_cast<double>(x.value().at2(i, j)));
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(x.value().at2(i, j) - mx);
    for (int j = 0; j < c; ++j) {
      out.at2(i, j) = static_cast<float>(std::exp(x.value().at2(i, j) - mx) / denom);
    }
  }
  return make_node(std::move(out), {x}, [t, c](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < t; ++i) {
      double dot = 0.0;
      for (int j = 0; j < c; ++j) {
        dot += static_cast<double>(n.grad.at2(i, j)) * n.value.at2(i, j);
      }
      for (int j = 0; j < c; ++j) {
        p.grad.at2(i, j) += static_cast<float>(
            n.value.at2(i, j) * (n.grad.at2(i, j) - dot));
      }
    }
  });
}

Var log_softmax_rows(const Var& x) {
  check_ndim(x.value(), 2, "log_softmax_rows");
  const int t = x.value().dim(0), c = x.value().dim(1);
  Tensor out({t, c});
  for (int i = 0; i < t; ++i) {
    double mx = -1e300;
    for (int j = 0; j < c; ++j) mx = std::max(mx, static_cast<double>(x.value().at2(i, j)));
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(x.value().at2(i, j) - mx);
    const double log_denom = std::log(denom) + mx;
    for (int j = 0; j < c; ++j) {
      out.at2(i, j) = static_cast<float>(x.value().at2(i, j) - log_denom);
    }
  }
  return make_node(std::move(out), {x}, [t, c](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < t; ++i) {
      double sum_dy = 0.0;
      for (int j = 0; j < c; ++j) sum_dy += n.grad.at2(i, j);
      for (int j = 0; j < c; ++j) {
        const double sm = std::exp(n.value.at2(i, j));
        p.grad.at2(i, j) += static_cast<float>(n.grad.at2(i, j) - sm * sum_dy);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// conv / resampling

Var conv1d_same(const Var& x, const Var& w, const Var& b, PadMode1d mode) {
  check_ndim(x.value(), 2, "conv1d_same");
  check_ndim(w.value(), 3, "conv1d_same weight");
  const int t = x.value().dim(0), cin = x.value().dim(1);
  const int k = w.value().dim(0), cout = w.value().dim(2);
  if (w.value().dim(1) != cin) throw ShapeMismatch("conv1d_same: cin mismatch");
  if (b.defined() && b.value().numel() != cout) {
    throw ShapeMismatch("conv1d_same: bias mismatch");
  }
  const int mid = k / 2;
  const int kc = k * cin;

  // im2col: col[t, k*cin]
  Tensor col({t, kc});
  for (int i = 0; i < t; ++i) {
    for (int kk = 0; kk < k; ++kk) {
      int src = i + kk - mid;
      bool oob = src < 0 || src >= t;
      if (mode == PadMode1d::kReplicate) {
        src = std::min(std::max(src, 0), t - 1);
        oob = false;
      }
      for (int c = 0; c < cin; ++c) {
        col.at2(i, kk * cin + c) = oob ? 0.0f : x.value().at2(src, c);
      }
    }
  }
  Tensor out({t, cout});
  gemm(t, kc, cout, col.data(), w.value().data(), out.data(), false);
  if (b.defined()) {
    for (int i = 0; i < t; ++i)
      for (int c = 0; c < cout; ++c) out.at2(i, c) += b.value().flat(c);
  }
  std::vector<Var> parents = {x, w};
  if (b.defined()) parents.push_back(b);
  auto col_holder = std::make_shared<Tensor>(std::move(col));
  return make_node(std::move(out), std::move(parents),
                   [t, cin, k, cout, kc, mid, mode, col_holder](Node& n) {
    Node& px = *n.parents[0];
    Node& pw = *n.parents[1];
    if (pw.requires_grad) {
      pw.ensure_grad();
      // dW += col^T * dY
      gemm_tn(kc, t, cout, col_holder->data(), n.grad.data(), pw.grad.data(), true);
    }
    if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
      Node& pb = *n.parents[2];
      pb.ensure_grad();
      for (int i = 0; i < t; ++i)
        for (int c = 0; c < cout; ++c) pb.grad.flat(c) += n.grad.at2(i, c);
    }
    if (px.requires_grad) {
      px.ensure_grad();
      Tensor dcol({t, kc});
      gemm_nt(t, cout, kc, n.grad.data(), pw.value.data(), dcol.data(), false);
      for (int i = 0; i < t; ++i) {
        for (int kk = 0; kk < k; ++kk) {
          int src = i + kk - mid;
          if (mode == PadMode1d::kReplicate) {
            src = std::min(std::max(src, 0), t - 1);
          } else if (src < 0 || src >= t) {
            continue;
          }
          for (int c = 0; c < cin; ++c) {
            px.grad.at2(src, c) += dcol.at2(i, kk * cin + c);
          }
        }
      }
    }
  });
}

namespace {
struct Conv2dDims {
  int cin, h, w, cout, kh, kw, stride, pad, ho, wo;
};

void im2col2d(const Tensor& x, const Conv2dDims& d, Tensor& col) {
  for (int c = 0; c < d.cin; ++c) {
    for (int di = 0; di < d.kh; ++di) {
      for (int dj = 0; dj < d.kw; ++dj) {
        const int row = (c * d.kh + di) * d.kw + dj;
        for (int oy = 0; oy < d.ho; ++oy) {
          const int sy = oy * d.stride + di - d.pad;
          for (int ox = 0; ox < d.wo; ++ox) {
            const int sx = ox * d.stride + dj - d.pad;
            float v = 0.0f;
            if (sy >= 0 && sy < d.h && sx >= 0 && sx < d.w) v = x.at3(c, sy, sx);
            col.at2(row, oy * d.wo + ox) = v;
          }
        }
      }
    }
  }
}

void col2im2d(const Tensor& dcol, const Conv2dDims& d, Tensor& dx) {
  for (int c = 0; c < d.cin; ++c) {
    for (int di = 0; di < d.kh; ++di) {
      for (int dj = 0; dj < d.kw; ++dj) {
        const int row = (c * d.kh + di) * d.kw + dj;
        for (int oy = 0; oy < d.ho; ++oy) {
          const int sy = oy * d.stride + di - d.pad;
          if (sy < 0 || sy >= d.h) continue;
          for (int ox = 0; ox < d.wo; ++ox) {
            const int sx = ox * d.stride + dj - d.pad;
            if (sx < 0 || sx >= d.w) continue;
            dx.at3(c, sy, sx) += dcol.at2(row, oy * d.wo + ox);
          }
        }
      }
    }
  }
}
}  // namespace

Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad) {
  check_ndim(x.value(), 3, "conv2d");
  check_ndim(w.value(), 4, "conv2d weight");
  Conv2dDims d;
  d.cin = x.value().dim(0);
  d.h = x.value().dim(1);
  d.w = x.value().dim(2);
  d.cout = w.value().dim(0);
  d.kh = w.value().dim(2);
  d.kw = w.value().dim(3);
  d.stride = stride;
  d.pad = pad;
  if (w.value().dim(1) != d.cin) throw ShapeMismatch("conv2d: cin mismatch");
  d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
  d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
  if (d.ho < 1 || d.wo < 1) throw ShapeMismatch("conv2d: output collapses");
  if (b.defined() && b.value().numel() != d.cout) {
    throw ShapeMismatch("conv2d: bias mismatch");
  }
  const int kck = d.cin * d.kh * d.kw;
  const int hw = d.ho * d.wo;

  Tensor col({kck, hw});
  im2col2d(x.value(), d, col);
  Tensor out({d.cout, d.ho, d.wo});
  gemm(d.cout, kck, hw, w.value().data(), col.data(), out.data(), false);
  if (b.defined()) {
    for (int c = 0; c < d.cout; ++c) {
      const float bv = b.value().flat(c);
      for (int i = 0; i < hw; ++i) out.flat(static_cast<int64_t>(c) * hw + i) += bv;
    }
  }
  std::vector<Var> parents = {x, w};
  if (b.defined()) parents.push_back(b);
  auto col_holder = std::make_shared<Tensor>(std::move(col));
  return make_node(std::move(out), std::move(parents), [d, kck, hw, col_holder](Node& n) {
    Node& px = *n.parents[0];
    Node& pw = *n.parents[1];
    if (pw.requires_grad) {
      pw.ensure_grad();
      // dW += dY * col^T
      gemm_nt(d.cout, hw, kck, n.grad.data(), col_holder->data(), pw.grad.data(), true);
    }
    if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
      Node& pb = *n.parents[2];
      pb.ensure_grad();
      for (int c = 0; c < d.cout; ++c) {
        double acc = 0.0;
        for (int i = 0; i < hw; ++i) acc += n.grad.flat(static_cast<int64_t>(c) * hw + i);
        pb.grad.flat(c) += static_cast<float>(acc);
      }
    }
    if (px.requires_grad) {
      px.ensure_grad();
      Tensor dcol({kck, hw});
      // dcol = W^T * dY
      gemm_tn(kck, d.cout, hw, pw.value.data(), n.grad.data(), dcol.data(), false);
      col2im2d(dcol, d, px.grad);
    }
  });
}

Var avg_pool2x(const Var& x) {
  check_ndim(x.value(), 3, "avg_pool2x");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (h % 2 != 0 || w % 2 != 0) throw ShapeMismatch("avg_pool2x: odd spatial dims");
  Tensor out({c, h / 2, w / 2});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h / 2; ++i)
      for (int j = 0; j < w / 2; ++j) {
        out.at3(ch, i, j) =
            0.25f * (x.value().at3(ch, 2 * i, 2 * j) + x.value().at3(ch, 2 * i, 2 * j + 1) +
                     x.value().at3(ch, 2 * i + 1, 2 * j) + x.value().at3(ch, 2 * i + 1, 2 * j + 1));
      }
  return make_node(std::move(out), {x}, [c, h, w](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < h / 2; ++i)
        for (int j = 0; j < w / 2; ++j) {
          const float g = 0.25f * n.grad.at3(ch, i, j);
          p.grad.at3(ch, 2 * i, 2 * j) += g;
          p.grad.at3(ch, 2 * i, 2 * j + 1) += g;
          p.grad.at3(ch, 2 * i + 1, 2 * j) += g;
          p.grad.at3(ch, 2 * i + 1, 2 * j + 1) += g;
        }
  });
}

Var upsample2x_nearest(const Var& x) {
  check_ndim(x.value(), 3, "upsample2x_nearest");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  Tensor out({c, 2 * h, 2 * w});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        const float v = x.value().at3(ch, i, j);
        out.at3(ch, 2 * i, 2 * j) = v;
        out.at3(ch, 2 * i, 2 * j + 1) = v;
        out.at3(ch, 2 * i + 1, 2 * j) = v;
        out.at3(ch, 2 * i + 1, 2 * j + 1) = v;
      }
  return make_node(std::move(out), {x}, [c, h, w](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
          p.grad.at3(ch, i, j) += n.grad.at3(ch, 2 * i, 2 * j) +
                                  n.grad.at3(ch, 2 * i, 2 * j + 1) +
                                  n.grad.at3(ch, 2 * i + 1, 2 * j) +
                                  n.grad.at3(ch, 2 * i + 1, 2 * j + 1);
        }
  });
}

// ---------------------------------------------------------------------------
// broadcast bias

Var add_bias_rows(const Var& x, const Var& v) {
  check_ndim(x.value(), 2, "add_bias_rows");
  const int t = x.value().dim(0), c = x.value().dim(1);
  if (v.value().numel() != c) throw ShapeMismatch("add_bias_rows: dim mismatch");
  Tensor out({t, c});
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < c; ++j) out.at2(i, j) = x.value().at2(i, j) + v.value().flat(j);
  return make_node(std::move(out), {x, v}, [t, c](Node& n) {
    Node& px = *n.parents[0];
    Node& pv = *n.parents[1];
    if (px.requires_grad) accum(px, n.grad);
    if (pv.requires_grad) {
      pv.ensure_grad();
      for (int j = 0; j < c; ++j) {
        double acc = 0.0;
        for (int i = 0; i < t; ++i) acc += n.grad.at2(i, j);
        pv.grad.flat(j) += static_cast<float>(acc);
      }
    }
  });
}

Var add_bias_channels(const Var& x, const Var& v) {
  check_ndim(x.value(), 3, "add_bias_channels");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (v.value().numel() != c) throw ShapeMismatch("add_bias_channels: dim mismatch");
  Tensor out({c, h, w});
  const int64_t plane = static_cast<int64_t>(h) * w;
  for (int ch = 0; ch < c; ++ch) {
    const float bv = v.value().flat(ch);
    for (int64_t i = 0; i < plane; ++i) {
      out.flat(ch * plane + i) = x.value().flat(ch * plane + i) + bv;
    }
  }
  return make_node(std::move(out), {x, v}, [c, plane](Node& n) {
    Node& px = *n.parents[0];
    Node& pv = *n.parents[1];
    if (px.requires_grad) accum(px, n.grad);
    if (pv.requires_grad) {
      pv.ensure_grad();
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (int64_t i = 0; i < plane; ++i) acc += n.grad.flat(ch * plane + i);
        pv.grad.flat(ch) += static_cast<float>(acc);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// embedding

Var embedding_lookup(const Var& table, const std::vector<int>& ids) {
  check_ndim(table.value(), 2, "embedding_lookup");
  const int k = table.value().dim(0), c = table.value().dim(1);
  const int t = static_cast<int>(ids.size());
  if (t < 1) throw ShapeMismatch("embedding_lookup: empty id sequence");
  for (int id : ids) {
    if (id < 0 || id >= k) {
      throw UnitOutOfRange("unit id " + std::to_string(id) + " outside [0, " +
                           std::to_string(k) + ")");
    }
  }
  Tensor out({t, c});
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < c; ++j) out.at2(i, j) = table.value().at2(ids[i], j);
  auto ids_copy = std::make_shared<std::vector<int>>(ids);
  return make_node(std::move(out), {table}, [t, c, ids_copy](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < c; ++j) p.grad.at2((*ids_copy)[i], j) += n.grad.at2(i, j);
  });
}

// ---------------------------------------------------------------------------
// reductions

Var sum_all(const Var& x) {
  double acc = 0.0;
  for (int64_t i = 0; i < x.value().numel(); ++i) acc += x.value().flat(i);
  Tensor out({1});
  out.flat(0) = static_cast<float>(acc);
  return make_node(std::move(out), {x}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const float g = n.grad.flat(0);
    for (int64_t i = 0; i < p.grad.numel(); ++i) p.grad.flat(i) += g;
  });
}

Var mean_all(const Var& x) {
  const int64_t n = x.value().numel();
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) acc += x.value().flat(i);
  Tensor out({1});
  out.flat(0) = static_cast<float>(acc / n);
  return make_node(std::move(out), {x}, [n](Node& node) {
    Node& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const float g = static_cast<float>(node.grad.flat(0) / static_cast<double>(n));
    for (int64_t i = 0; i < p.grad.numel(); ++i) p.grad.flat(i) += g;
  });
}

Var sum_sq(const Var& x) {
  double acc = 0.0;
  for (int64_t i = 0; i < x.value().numel(); ++i) {
    const double v = x.value().flat(i);
    acc += v * v;
  }
  Tensor out({1});
  out.flat(0) = static_cast<float>(acc);
  return make_node(std::move(out), {x}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const float g = n.grad.flat(0);
    for (int64_t i = 0; i < p.grad.numel(); ++i) {
      p.grad.flat(i) += 2.0f * g * p.value.flat(i);
    }
  });
}

Var l1_mean(const Var& a, const Var& b) {
  check_same_shape(a.value(), b.value(), "l1_mean");
  const int64_t n = a.value().numel();
  double acc = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    acc += std::abs(static_cast<double>(a.value().flat(i)) - b.value().flat(i));
  }
  Tensor out({1});
  out.flat(0) = static_cast<float>(acc / n);
  return make_node(std::move(out), {a, b}, [n](Node& node) {
    Node& pa = *node.parents[0];
    Node& pb = *node.parents[1];
    const float g = static_cast<float>(node.grad.flat(0) / static_cast<double>(n));
    if (pa.requires_grad) pa.ensure_grad();
    if (pb.requires_grad) pb.ensure_grad();
    for (int64_t i = 0; i < n; ++i) {
      const float d = pa.value.flat(i) - pb.value.flat(i);
      const float s = (d > 0.0f) ? 1.0f : (d < 0.0f ? -1.0f : 0.0f);
      if (pa.requires_grad) pa.grad.flat(i) += g * s;
      if (pb.requires_grad) pb.grad.flat(i) -= g * s;
    }
  });
}

Var nll_rows(const Var& log_probs, const std::vector<int>& targets) {
  check_ndim(log_probs.value(), 2, "nll_rows");
  const int t = log_probs.value().dim(0), c = log_probs.value().dim(1);
  if (static_cast<int>(targets.size()) != t) {
    throw ShapeMismatch("nll_rows: target count mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < t; ++i) {
    const int tgt = targets[i];
    if (tgt < 0 || tgt >= c) throw ShapeMismatch("nll_rows: target out of range");
    acc -= log_probs.value().at2(i, tgt);
  }
  Tensor out({1});
  out.flat(0) = static_cast<float>(acc / t);
  auto tgt_copy = std::make_shared<std::vector<int>>(targets);
  return make_node(std::move(out), {log_probs}, [t, tgt_copy](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const float g = static_cast<float>(n.grad.flat(0) / static_cast<double>(t));
    for (int i = 0; i < t; ++i) p.grad.at2(i, (*tgt_copy)[i]) -= g;
  });
}

}  // namespace nn
}  // namespace revoice
