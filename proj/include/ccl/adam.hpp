#ifndef CCL_ADAM_HPP
#define CCL_ADAM_HPP

#include <cmath>
#include <cstdint>

#include "ccl/model.hpp"

namespace ccl {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Moments live per parameter tensor; tensors without a
// gradient entry (batch-norm running stats) are left alone.
template <typename S>
struct AdamState {
  AdamConfig cfg;
  std::int64_t step_count = 0;
  ParamMap<S> m, v;

  explicit AdamState(AdamConfig c = {}) : cfg(c) {}
};

template <typename S>
void adam_step(ModelParams<S>& params, const ParamMap<S>& grads,
               AdamState<S>& st) {
  ++st.step_count;
  const double b1 = st.cfg.beta1, b2 = st.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.step_count));
  for (const auto& [name, g] : grads) {
    Tensor<S>& p = params.at(name);
    if (!p.same_shape(g))
      throw ShapeMismatch("adam_step: grad shape mismatch for " + name);
    auto mi = st.m.find(name);
    if (mi == st.m.end()) {
      mi = st.m.emplace(name, Tensor<S>::zeros_like(g)).first;
      st.v.emplace(name, Tensor<S>::zeros_like(g));
    }
    Tensor<S>& m = mi->second;
    Tensor<S>& v = st.v.at(name);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double gi = static_cast<double>(g.data[i]);
      const double mi_d = b1 * static_cast<double>(m.data[i]) + (1.0 - b1) * gi;
      const double vi_d =
          b2 * static_cast<double>(v.data[i]) + (1.0 - b2) * gi * gi;
      m.data[i] = static_cast<S>(mi_d);
      v.data[i] = static_cast<S>(vi_d);
      const double mhat = mi_d / bc1;
      const double vhat = vi_d / bc2;
      p.data[i] = static_cast<S>(static_cast<double>(p.data[i]) -
                                 st.cfg.lr * mhat /
                                     (std::sqrt(vhat) + st.cfg.eps));
    }
  }
}

}  // namespace ccl

#endif  // CCL_ADAM_HPP
