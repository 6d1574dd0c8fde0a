#ifndef CCL_LABELS_HPP
#define CCL_LABELS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ccl/errors.hpp"

namespace ccl {

enum class LabelKind { ohe, lds, lds_lsr, ohe_lsr };

// Per-sample training target aligned 1:1 with a waveform segment.
struct LabelMap {
  Eigen::VectorXd values;  // each in [0,1]
  LabelKind kind = LabelKind::ohe;
};

struct LdsConfig {
  double sigma = 10.0;  // Gaussian RMS width, in samples
};

struct LsrConfig {
  double epsilon = 0.1;  // in [0,1)
  static constexpr int num_classes = 2;
};

// 1 exactly at each mark, 0 elsewhere.
LabelMap ohe_labels(const std::vector<std::int64_t>& marks, std::int64_t length);

// Gaussian-smoothed targets, summed over marks and clipped at 1:
//   p(t) = min(1, sum_i exp(-(t - t_i)^2 / (2 sigma^2)))
LabelMap lds_labels(const std::vector<std::int64_t>& marks, std::int64_t length,
                    const LdsConfig& cfg);

// Two-class label softening: v -> (1 - eps) * v + eps / 2.
LabelMap lsr_apply(const LabelMap& labels, const LsrConfig& cfg);

}  // namespace ccl

#endif  // CCL_LABELS_HPP
