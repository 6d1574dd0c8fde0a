#ifndef CCL_LAYERS_HPP
#define CCL_LAYERS_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ccl/tensor.hpp"

// 1-D neural-network primitives with explicit backward passes. Everything is
// templated on the scalar so the same code can run in float for training and
// in double for finite-difference checks. Convolutions are cross-correlations
// (no kernel flip) lowered to a GEMM through im2col.

namespace ccl {

inline Eigen::Index conv_out_len(Eigen::Index len, int kernel, int stride,
                                 int pad) {
  return (len + 2 * static_cast<Eigen::Index>(pad) - kernel) / stride + 1;
}

namespace detail {

// Gather x [B,C,L] into columns [C*K, B*Lout]; out-of-range taps read zero.
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> im2col(const Tensor<S>& x,
                                                        int kernel, int stride,
                                                        int pad,
                                                        Eigen::Index l_out) {
  const Eigen::Index b_n = x.dims[0], ch = x.dims[1], len = x.dims[2];
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> cols(ch * kernel,
                                                        b_n * l_out);
  cols.setZero();
  for (Eigen::Index b = 0; b < b_n; ++b)
    for (Eigen::Index i = 0; i < l_out; ++i) {
      const Eigen::Index col = b * l_out + i;
      const Eigen::Index base = i * stride - pad;
      for (Eigen::Index c = 0; c < ch; ++c)
        for (Eigen::Index k = 0; k < kernel; ++k) {
          const Eigen::Index src = base + k;
          if (src >= 0 && src < len) cols(c * kernel + k, col) = x(b, c, src);
        }
    }
  return cols;
}

}  // namespace detail

// ---------------------------------------------------------------- conv1d ----

template <typename S>
Tensor<S> conv1d_forward(const Tensor<S>& x, const Tensor<S>& w,
                         const Tensor<S>& b, int stride, int pad) {
  if (x.rank != 3 || w.rank != 3 || b.rank != 1)
    throw ShapeMismatch("conv1d: expected x rank 3, w rank 3, b rank 1");
  if (w.dims[1] != x.dims[1])
    throw ShapeMismatch("conv1d: channel mismatch x" + x.shape_str() + " w" +
                        w.shape_str());
  if (b.dims[0] != w.dims[0])
    throw ShapeMismatch("conv1d: bias size mismatch");
  const Eigen::Index b_n = x.dims[0], c_out = w.dims[0];
  const int kernel = static_cast<int>(w.dims[2]);
  const Eigen::Index l_out = conv_out_len(x.dims[2], kernel, stride, pad);
  if (l_out <= 0) throw ShapeMismatch("conv1d: empty output");

  auto cols = detail::im2col(x, kernel, stride, pad, l_out);
  auto w_mat = w.mat(c_out, w.dims[1] * kernel);
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> prod = w_mat * cols;

  Tensor<S> y = Tensor<S>::zeros3(b_n, c_out, l_out);
  for (Eigen::Index bb = 0; bb < b_n; ++bb)
    for (Eigen::Index c = 0; c < c_out; ++c)
      for (Eigen::Index i = 0; i < l_out; ++i)
        y(bb, c, i) = prod(c, bb * l_out + i) + b(c);
  return y;
}

template <typename S>
struct Conv1dGrads {
  Tensor<S> dx, dw, db;
};

template <typename S>
Conv1dGrads<S> conv1d_backward(const Tensor<S>& x, const Tensor<S>& w,
                               int stride, int pad, const Tensor<S>& dy) {
  const Eigen::Index b_n = x.dims[0], c_in = x.dims[1], len = x.dims[2];
  const Eigen::Index c_out = w.dims[0];
  const int kernel = static_cast<int>(w.dims[2]);
  const Eigen::Index l_out = conv_out_len(len, kernel, stride, pad);
  if (dy.rank != 3 || dy.dims[0] != b_n || dy.dims[1] != c_out ||
      dy.dims[2] != l_out)
    throw ShapeMismatch("conv1d_backward: dy shape " + dy.shape_str());

  // Regroup dy as [c_out, B*Lout] to line up with the im2col layout.
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> dy_mat(c_out, b_n * l_out);
  for (Eigen::Index bb = 0; bb < b_n; ++bb)
    for (Eigen::Index c = 0; c < c_out; ++c)
      for (Eigen::Index i = 0; i < l_out; ++i)
        dy_mat(c, bb * l_out + i) = dy(bb, c, i);

  auto cols = detail::im2col(x, kernel, stride, pad, l_out);

  Conv1dGrads<S> g;
  g.dw = Tensor<S>::zeros_like(w);
  g.dw.mat(c_out, c_in * kernel) = dy_mat * cols.transpose();

  g.db = Tensor<S>::zeros1(c_out);
  for (Eigen::Index c = 0; c < c_out; ++c) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < dy_mat.cols(); ++j)
      acc += static_cast<double>(dy_mat(c, j));
    g.db(c) = static_cast<S>(acc);
  }

  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> dcols =
      w.mat(c_out, c_in * kernel).transpose() * dy_mat;

  g.dx = Tensor<S>::zeros_like(x);
  for (Eigen::Index bb = 0; bb < b_n; ++bb)
    for (Eigen::Index i = 0; i < l_out; ++i) {
      const Eigen::Index col = bb * l_out + i;
      const Eigen::Index base = i * stride - pad;
      for (Eigen::Index c = 0; c < c_in; ++c)
        for (Eigen::Index k = 0; k < kernel; ++k) {
          const Eigen::Index src = base + k;
          if (src >= 0 && src < len)
            g.dx(bb, c, src) += dcols(c * kernel + k, col);
        }
    }
  return g;
}

// -------------------------------------------------------------- maxpool ----

template <typename S>
struct MaxPoolResult {
  Tensor<S> y;
  std::vector<Eigen::Index> argmax;  // flat input index per output element
};

template <typename S>
MaxPoolResult<S> maxpool1d_forward(const Tensor<S>& x, int kernel, int stride) {
  if (x.rank != 3) throw ShapeMismatch("maxpool1d: expected rank 3");
  const Eigen::Index b_n = x.dims[0], ch = x.dims[1], len = x.dims[2];
  const Eigen::Index l_out = conv_out_len(len, kernel, stride, /*pad=*/0);
  if (l_out <= 0) throw ShapeMismatch("maxpool1d: empty output");

  MaxPoolResult<S> r;
  r.y = Tensor<S>::zeros3(b_n, ch, l_out);
  r.argmax.assign(static_cast<std::size_t>(b_n * ch * l_out), 0);
  std::size_t out = 0;
  for (Eigen::Index b = 0; b < b_n; ++b)
    for (Eigen::Index c = 0; c < ch; ++c)
      for (Eigen::Index i = 0; i < l_out; ++i, ++out) {
        const Eigen::Index begin = i * stride;
        Eigen::Index best = begin;
        S best_v = x(b, c, begin);
        for (Eigen::Index k = 1; k < kernel && begin + k < len; ++k) {
          const S v = x(b, c, begin + k);
          if (v > best_v) {  // ties keep the earliest position
            best_v = v;
            best = begin + k;
          }
        }
        r.y(b, c, i) = best_v;
        r.argmax[out] = (b * ch + c) * len + best;
      }
  return r;
}

template <typename S>
Tensor<S> maxpool1d_backward(const MaxPoolResult<S>& fwd, const Tensor<S>& x,
                             const Tensor<S>& dy) {
  if (!fwd.y.same_shape(dy))
    throw ShapeMismatch("maxpool1d_backward: dy shape " + dy.shape_str());
  Tensor<S> dx = Tensor<S>::zeros_like(x);
  for (Eigen::Index i = 0; i < dy.size(); ++i)
    dx.data[fwd.argmax[static_cast<std::size_t>(i)]] += dy.data[i];
  return dx;
}

// ----------------------------------------------------------------- relu ----

template <typename S>
Tensor<S> relu_forward(const Tensor<S>& x) {
  Tensor<S> y = x;
  y.data = y.data.max(S(0));
  return y;
}

template <typename S>
Tensor<S> relu_backward(const Tensor<S>& x, const Tensor<S>& dy) {
  if (!x.same_shape(dy)) throw ShapeMismatch("relu_backward: shape mismatch");
  Tensor<S> dx = dy;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x.data[i] <= S(0)) dx.data[i] = S(0);
  return dx;
}

// ------------------------------------------------------------------- fc ----

// w is [out, in]; y = x w^T + b.
template <typename S>
Tensor<S> fc_forward(const Tensor<S>& x, const Tensor<S>& w,
                     const Tensor<S>& b) {
  if (x.rank != 2 || w.rank != 2 || b.rank != 1)
    throw ShapeMismatch("fc: expected x rank 2, w rank 2, b rank 1");
  if (x.dims[1] != w.dims[1])
    throw ShapeMismatch("fc: feature mismatch x" + x.shape_str() + " w" +
                        w.shape_str());
  if (b.dims[0] != w.dims[0]) throw ShapeMismatch("fc: bias size mismatch");
  const Eigen::Index b_n = x.dims[0], out = w.dims[0], in = w.dims[1];
  Tensor<S> y = Tensor<S>::zeros2(b_n, out);
  y.mat(b_n, out).noalias() = x.mat(b_n, in) * w.mat(out, in).transpose();
  for (Eigen::Index i = 0; i < b_n; ++i)
    for (Eigen::Index j = 0; j < out; ++j) y(i, j) += b(j);
  return y;
}

template <typename S>
struct FcGrads {
  Tensor<S> dx, dw, db;
};

template <typename S>
FcGrads<S> fc_backward(const Tensor<S>& x, const Tensor<S>& w,
                       const Tensor<S>& dy) {
  const Eigen::Index b_n = x.dims[0], out = w.dims[0], in = w.dims[1];
  if (dy.rank != 2 || dy.dims[0] != b_n || dy.dims[1] != out)
    throw ShapeMismatch("fc_backward: dy shape " + dy.shape_str());
  FcGrads<S> g;
  g.dx = Tensor<S>::zeros_like(x);
  g.dx.mat(b_n, in).noalias() = dy.mat(b_n, out) * w.mat(out, in);
  g.dw = Tensor<S>::zeros_like(w);
  g.dw.mat(out, in).noalias() = dy.mat(b_n, out).transpose() * x.mat(b_n, in);
  g.db = Tensor<S>::zeros1(out);
  for (Eigen::Index j = 0; j < out; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b_n; ++i)
      acc += static_cast<double>(dy(i, j));
    g.db(j) = static_cast<S>(acc);
  }
  return g;
}

// ------------------------------------------------------------ batchnorm ----

inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;

template <typename S>
struct BatchNormCache {
  Tensor<S> xhat;
  Eigen::Array<double, Eigen::Dynamic, 1> inv_std;  // per channel
};

// Train-mode forward over x [B,C,L]: normalizes each channel by the batch
// statistics (population variance over B*L) and updates running stats with
// momentum 0.1. Statistics accumulate in double regardless of S.
template <typename S>
Tensor<S> batchnorm1d_train_forward(const Tensor<S>& x, const Tensor<S>& gamma,
                                    const Tensor<S>& beta,
                                    Tensor<S>& running_mean,
                                    Tensor<S>& running_var,
                                    BatchNormCache<S>& cache) {
  if (x.rank != 3) throw ShapeMismatch("batchnorm1d: expected rank 3");
  const Eigen::Index b_n = x.dims[0], ch = x.dims[1], len = x.dims[2];
  if (gamma.dims[0] != ch || beta.dims[0] != ch ||
      running_mean.dims[0] != ch || running_var.dims[0] != ch)
    throw ShapeMismatch("batchnorm1d: channel param mismatch");
  const double n = static_cast<double>(b_n * len);

  cache.xhat = Tensor<S>::zeros_like(x);
  cache.inv_std.resize(ch);
  Tensor<S> y = Tensor<S>::zeros_like(x);
  for (Eigen::Index c = 0; c < ch; ++c) {
    double sum = 0.0, sq = 0.0;
    for (Eigen::Index b = 0; b < b_n; ++b)
      for (Eigen::Index i = 0; i < len; ++i) {
        const double v = static_cast<double>(x(b, c, i));
        sum += v;
        sq += v * v;
      }
    const double mean = sum / n;
    double var = sq / n - mean * mean;
    if (var < 0.0) var = 0.0;  // guard FP cancellation
    const double inv = 1.0 / std::sqrt(var + kBnEps);
    cache.inv_std[c] = inv;
    for (Eigen::Index b = 0; b < b_n; ++b)
      for (Eigen::Index i = 0; i < len; ++i) {
        const double xh = (static_cast<double>(x(b, c, i)) - mean) * inv;
        cache.xhat(b, c, i) = static_cast<S>(xh);
        y(b, c, i) = static_cast<S>(static_cast<double>(gamma(c)) * xh +
                                    static_cast<double>(beta(c)));
      }
    running_mean(c) = static_cast<S>(
        (1.0 - kBnMomentum) * static_cast<double>(running_mean(c)) +
        kBnMomentum * mean);
    running_var(c) = static_cast<S>(
        (1.0 - kBnMomentum) * static_cast<double>(running_var(c)) +
        kBnMomentum * var);
  }
  return y;
}

template <typename S>
Tensor<S> batchnorm1d_eval_forward(const Tensor<S>& x, const Tensor<S>& gamma,
                                   const Tensor<S>& beta,
                                   const Tensor<S>& running_mean,
                                   const Tensor<S>& running_var) {
  if (x.rank != 3) throw ShapeMismatch("batchnorm1d: expected rank 3");
  const Eigen::Index b_n = x.dims[0], ch = x.dims[1], len = x.dims[2];
  Tensor<S> y = Tensor<S>::zeros_like(x);
  for (Eigen::Index c = 0; c < ch; ++c) {
    const double inv =
        1.0 / std::sqrt(static_cast<double>(running_var(c)) + kBnEps);
    const double mean = static_cast<double>(running_mean(c));
    const double g = static_cast<double>(gamma(c));
    const double be = static_cast<double>(beta(c));
    for (Eigen::Index b = 0; b < b_n; ++b)
      for (Eigen::Index i = 0; i < len; ++i)
        y(b, c, i) = static_cast<S>(
            g * ((static_cast<double>(x(b, c, i)) - mean) * inv) + be);
  }
  return y;
}

template <typename S>
struct BatchNormGrads {
  Tensor<S> dx, dgamma, dbeta;
};

template <typename S>
BatchNormGrads<S> batchnorm1d_backward(const BatchNormCache<S>& cache,
                                       const Tensor<S>& gamma,
                                       const Tensor<S>& dy) {
  const Eigen::Index b_n = dy.dims[0], ch = dy.dims[1], len = dy.dims[2];
  if (!cache.xhat.same_shape(dy))
    throw ShapeMismatch("batchnorm1d_backward: dy shape " + dy.shape_str());
  const double n = static_cast<double>(b_n * len);
  BatchNormGrads<S> g;
  g.dx = Tensor<S>::zeros_like(dy);
  g.dgamma = Tensor<S>::zeros1(ch);
  g.dbeta = Tensor<S>::zeros1(ch);
  for (Eigen::Index c = 0; c < ch; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (Eigen::Index b = 0; b < b_n; ++b)
      for (Eigen::Index i = 0; i < len; ++i) {
        const double d = static_cast<double>(dy(b, c, i));
        sum_dy += d;
        sum_dy_xhat += d * static_cast<double>(cache.xhat(b, c, i));
      }
    g.dgamma(c) = static_cast<S>(sum_dy_xhat);
    g.dbeta(c) = static_cast<S>(sum_dy);
    const double scale = static_cast<double>(gamma(c)) * cache.inv_std[c];
    for (Eigen::Index b = 0; b < b_n; ++b)
      for (Eigen::Index i = 0; i < len; ++i) {
        const double d = static_cast<double>(dy(b, c, i));
        const double xh = static_cast<double>(cache.xhat(b, c, i));
        g.dx(b, c, i) = static_cast<S>(
            scale * (d - sum_dy / n - xh * sum_dy_xhat / n));
      }
  }
  return g;
}

// ------------------------------------------------------- sigmoid / loss ----

template <typename S>
Tensor<S> sigmoid(const Tensor<S>& x) {
  Tensor<S> y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double z = static_cast<double>(x.data[i]);
    y.data[i] = static_cast<S>(1.0 / (1.0 + std::exp(-z)));
  }
  return y;
}

template <typename S>
struct BceResult {
  double loss = 0.0;  // mean over all elements
  Tensor<S> dlogits;
};

// Numerically stable binary cross-entropy on logits:
//   loss = max(z,0) - z*y + log(1 + exp(-|z|)),  d/dz = sigmoid(z) - y,
// both averaged over every element of the batch.
template <typename S>
BceResult<S> bce_with_logits(const Tensor<S>& logits, const Tensor<S>& targets) {
  if (!logits.same_shape(targets))
    throw ShapeMismatch("bce_with_logits: logits " + logits.shape_str() +
                        " vs targets " + targets.shape_str());
  const Eigen::Index n = logits.size();
  BceResult<S> r;
  r.dlogits = Tensor<S>::zeros_like(logits);
  double acc = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = static_cast<double>(logits.data[i]);
    const double y = static_cast<double>(targets.data[i]);
    acc += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    const double sig = 1.0 / (1.0 + std::exp(-z));
    r.dlogits.data[i] = static_cast<S>((sig - y) * inv_n);
  }
  r.loss = acc * inv_n;
  return r;
}

}  // namespace ccl

#endif  // CCL_LAYERS_HPP
