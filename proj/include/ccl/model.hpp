#ifndef CCL_MODEL_HPP
#define CCL_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccl/layers.hpp"
#include "ccl/rng.hpp"
#include "ccl/tensor.hpp"

// Window classifiers. TAN is the AlexNet-style five-convolution network; MAN
// is the lighter three-convolution variant with batch norm. Both map a window
// of W samples to W per-sample logits.

namespace ccl {

enum class Arch : std::uint8_t { TAN = 0, MAN = 1 };

inline const char* arch_name(Arch a) { return a == Arch::TAN ? "TAN" : "MAN"; }

inline Arch arch_from_name(const std::string& s) {
  if (s == "TAN" || s == "tan") return Arch::TAN;
  if (s == "MAN" || s == "man") return Arch::MAN;
  throw ConfigError("unknown architecture '" + s + "' (expected TAN or MAN)");
}

enum class LayerKind { conv, bn, relu, pool, flatten, fc };

struct LayerSpec {
  LayerKind kind;
  std::string name;  // parameter prefix; empty for parameterless layers
  int in_ch = 0, out_ch = 0, kernel = 0, stride = 1, pad = 0;
  Eigen::Index in_dim = 0, out_dim = 0;  // fc
  Eigen::Index out_len = 0;              // spatial length after this layer
};

struct LayerCensus {
  int conv = 0, bn = 0, pool = 0, fc = 0;
};

struct ArchDescriptor {
  Arch arch = Arch::TAN;
  Eigen::Index input_len = 0;
  Eigen::Index flatten_dim = 0;
  std::vector<LayerSpec> layers;

  LayerCensus census() const {
    LayerCensus c;
    for (const auto& l : layers) {
      if (l.kind == LayerKind::conv) ++c.conv;
      if (l.kind == LayerKind::bn) ++c.bn;
      if (l.kind == LayerKind::pool) ++c.pool;
      if (l.kind == LayerKind::fc) ++c.fc;
    }
    return c;
  }
};

ArchDescriptor build_arch(Arch arch, Eigen::Index input_len);

// Trainable parameters only (batch-norm running stats excluded).
std::int64_t param_count(const ArchDescriptor& desc);

// Every tensor a checkpoint must carry, in layer order: weights, biases, and
// batch-norm affine + running stats.
std::vector<std::string> tensor_names(const ArchDescriptor& desc);

template <typename S>
using ParamMap = std::map<std::string, Tensor<S>>;

template <typename S>
struct ModelParams {
  ArchDescriptor desc;
  ParamMap<S> tensors;

  Tensor<S>& at(const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ShapeMismatch("missing tensor " + name);
    return it->second;
  }
  const Tensor<S>& at(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ShapeMismatch("missing tensor " + name);
    return it->second;
  }

  template <typename T>
  ModelParams<T> cast() const {
    ModelParams<T> out;
    out.desc = desc;
    for (const auto& [k, v] : tensors) out.tensors[k] = v.template cast<T>();
    return out;
  }
};

enum class RunMode { train, eval };

template <typename S>
struct LayerTrace {
  Tensor<S> input;
  MaxPoolResult<S> pool;
  BatchNormCache<S> bn;
};

template <typename S>
struct Trace {
  std::vector<LayerTrace<S>> layers;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

// Kaiming-uniform fan-in initialization (bound sqrt(6/fan_in)) for weights,
// zero biases, identity batch norm. Each tensor draws from its own stream so
// the values depend only on (seed, tensor name).
template <typename S>
ModelParams<S> init_params(const ArchDescriptor& desc, std::uint64_t seed) {
  ModelParams<S> p;
  p.desc = desc;
  auto fill_uniform = [&](Tensor<S>& t, const std::string& name, double bound) {
    SplitMix64 rng(mix64(seed, detail::fnv1a(name)));
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t.data[i] = static_cast<S>(rng.uniform(-bound, bound));
  };
  for (const auto& l : desc.layers) {
    if (l.kind == LayerKind::conv) {
      Tensor<S> w = Tensor<S>::zeros3(l.out_ch, l.in_ch, l.kernel);
      fill_uniform(w, l.name + ".w",
                   std::sqrt(6.0 / (static_cast<double>(l.in_ch) * l.kernel)));
      p.tensors[l.name + ".w"] = std::move(w);
      p.tensors[l.name + ".b"] = Tensor<S>::zeros1(l.out_ch);
    } else if (l.kind == LayerKind::fc) {
      Tensor<S> w = Tensor<S>::zeros2(l.out_dim, l.in_dim);
      fill_uniform(w, l.name + ".w",
                   std::sqrt(6.0 / static_cast<double>(l.in_dim)));
      p.tensors[l.name + ".w"] = std::move(w);
      p.tensors[l.name + ".b"] = Tensor<S>::zeros1(l.out_dim);
    } else if (l.kind == LayerKind::bn) {
      Tensor<S> gamma = Tensor<S>::zeros1(l.out_ch);
      gamma.data.setConstant(S(1));
      p.tensors[l.name + ".gamma"] = std::move(gamma);
      p.tensors[l.name + ".beta"] = Tensor<S>::zeros1(l.out_ch);
      p.tensors[l.name + ".running_mean"] = Tensor<S>::zeros1(l.out_ch);
      Tensor<S> rv = Tensor<S>::zeros1(l.out_ch);
      rv.data.setConstant(S(1));
      p.tensors[l.name + ".running_var"] = std::move(rv);
    }
  }
  return p;
}

// Runs the network on x [B,1,W] and returns logits [B,W]. Train mode updates
// batch-norm running stats and, when trace is given, records what backward
// needs.
template <typename S>
Tensor<S> forward(ModelParams<S>& p, const Tensor<S>& x, RunMode mode,
                  Trace<S>* trace = nullptr) {
  if (x.rank != 3 || x.dims[1] != 1 || x.dims[2] != p.desc.input_len)
    throw ShapeMismatch("forward: expected input [B,1," +
                        std::to_string(p.desc.input_len) + "], got " +
                        x.shape_str());
  if (trace) trace->layers.assign(p.desc.layers.size(), {});
  Tensor<S> cur = x;
  for (std::size_t li = 0; li < p.desc.layers.size(); ++li) {
    const LayerSpec& l = p.desc.layers[li];
    if (trace) trace->layers[li].input = cur;
    switch (l.kind) {
      case LayerKind::conv:
        cur = conv1d_forward(cur, p.at(l.name + ".w"), p.at(l.name + ".b"),
                             l.stride, l.pad);
        break;
      case LayerKind::bn:
        if (mode == RunMode::train) {
          BatchNormCache<S> cache;
          cur = batchnorm1d_train_forward(
              cur, p.at(l.name + ".gamma"), p.at(l.name + ".beta"),
              p.at(l.name + ".running_mean"), p.at(l.name + ".running_var"),
              cache);
          if (trace) trace->layers[li].bn = std::move(cache);
        } else {
          cur = batchnorm1d_eval_forward(cur, p.at(l.name + ".gamma"),
                                         p.at(l.name + ".beta"),
                                         p.at(l.name + ".running_mean"),
                                         p.at(l.name + ".running_var"));
        }
        break;
      case LayerKind::relu:
        cur = relu_forward(cur);
        break;
      case LayerKind::pool: {
        MaxPoolResult<S> r = maxpool1d_forward(cur, l.kernel, l.stride);
        cur = r.y;
        if (trace) trace->layers[li].pool = std::move(r);
        break;
      }
      case LayerKind::flatten:
        cur.rank = 2;
        cur.dims = {cur.dims[0], cur.dims[1] * cur.dims[2], 1};
        break;
      case LayerKind::fc:
        cur = fc_forward(cur, p.at(l.name + ".w"), p.at(l.name + ".b"));
        break;
    }
  }
  return cur;
}

// Eval-mode forward on const params (running stats untouched).
template <typename S>
Tensor<S> forward_eval(const ModelParams<S>& p, const Tensor<S>& x) {
  return forward<S>(const_cast<ModelParams<S>&>(p), x, RunMode::eval,
                    nullptr);
}

// Backprop through a recorded train-mode forward. Returns gradients keyed
// like the parameter map (trainable tensors only).
template <typename S>
ParamMap<S> backward(const ModelParams<S>& p, const Trace<S>& trace,
                     const Tensor<S>& dlogits) {
  if (trace.layers.size() != p.desc.layers.size())
    throw ShapeMismatch("backward: trace does not match architecture");
  ParamMap<S> grads;
  Tensor<S> d = dlogits;
  for (std::size_t n = p.desc.layers.size(); n-- > 0;) {
    const LayerSpec& l = p.desc.layers[n];
    const LayerTrace<S>& t = trace.layers[n];
    switch (l.kind) {
      case LayerKind::conv: {
        Conv1dGrads<S> g =
            conv1d_backward(t.input, p.at(l.name + ".w"), l.stride, l.pad, d);
        grads[l.name + ".w"] = std::move(g.dw);
        grads[l.name + ".b"] = std::move(g.db);
        d = std::move(g.dx);
        break;
      }
      case LayerKind::bn: {
        BatchNormGrads<S> g =
            batchnorm1d_backward(t.bn, p.at(l.name + ".gamma"), d);
        grads[l.name + ".gamma"] = std::move(g.dgamma);
        grads[l.name + ".beta"] = std::move(g.dbeta);
        d = std::move(g.dx);
        break;
      }
      case LayerKind::relu:
        d = relu_backward(t.input, d);
        break;
      case LayerKind::pool:
        d = maxpool1d_backward(t.pool, t.input, d);
        break;
      case LayerKind::flatten:
        d.rank = 3;
        d.dims = t.input.dims;
        break;
      case LayerKind::fc: {
        FcGrads<S> g = fc_backward(t.input, p.at(l.name + ".w"), d);
        grads[l.name + ".w"] = std::move(g.dw);
        grads[l.name + ".b"] = std::move(g.db);
        d = std::move(g.dx);
        break;
      }
    }
  }
  return grads;
}

}  // namespace ccl

#endif  // CCL_MODEL_HPP
