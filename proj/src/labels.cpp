#include "ccl/labels.hpp"

#include <cmath>
#include <string>

#include "ccl/errors.hpp"

namespace ccl {

namespace {

void check_marks(const std::vector<std::int64_t>& marks, std::int64_t length) {
  for (const auto m : marks)
    if (m < 0 || m >= length)
      throw IndexOutOfRange("mark " + std::to_string(m) +
                            " outside [0, " + std::to_string(length) + ")");
}

}  // namespace

LabelMap ohe_labels(const std::vector<std::int64_t>& marks,
                    std::int64_t length) {
  check_marks(marks, length);
  LabelMap lm;
  lm.kind = LabelKind::ohe;
  lm.values = Eigen::VectorXd::Zero(length);
  for (const auto m : marks) lm.values[m] = 1.0;
  return lm;
}

LabelMap lds_labels(const std::vector<std::int64_t>& marks, std::int64_t length,
                    const LdsConfig& cfg) {
  check_marks(marks, length);
  if (!(cfg.sigma > 0.0)) throw SpecInvalid("lds sigma must be > 0");

  LabelMap lm;
  lm.kind = LabelKind::lds;
  lm.values = Eigen::VectorXd::Zero(length);
  const double inv_two_sigma_sq = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
  for (std::int64_t t = 0; t < length; ++t) {
    double acc = 0.0;
    for (const auto m : marks) {
      const double d = double(t - m);
      acc += std::exp(-d * d * inv_two_sigma_sq);
    }
    lm.values[t] = acc < 1.0 ? acc : 1.0;
  }
  return lm;
}

LabelMap lsr_apply(const LabelMap& labels, const LsrConfig& cfg) {
  if (cfg.epsilon < 0.0 || cfg.epsilon >= 1.0)
    throw SpecInvalid("lsr epsilon must be in [0,1)");

  LabelMap out;
  out.values =
      (1.0 - cfg.epsilon) * labels.values.array() + cfg.epsilon / 2.0;
  out.kind = (labels.kind == LabelKind::lds || labels.kind == LabelKind::lds_lsr)
                 ? LabelKind::lds_lsr
                 : LabelKind::ohe_lsr;
  return out;
}

}  // namespace ccl
