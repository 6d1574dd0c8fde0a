#ifndef CCL_WAVEFORM_HPP
#define CCL_WAVEFORM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ccl/errors.hpp"

namespace ccl {

// A uniformly sampled CCL voltage trace. Samples are stored as f32, matching
// the on-disk dtype bit for bit; all arithmetic on them runs in double.
struct Waveform {
  Eigen::VectorXf samples;
  double sample_rate_hz = 1000.0;
  std::vector<std::int64_t> collar_marks;  // sorted, strictly increasing

  // Throws SpecInvalid if any structural invariant is broken.
  void validate() const;
};

enum class NormKind { standardization, minmax_01, minmax_sym };
enum class RangeSource { waveform_dynamic, adc_full_scale };

struct NormalizationSpec {
  NormKind kind = NormKind::standardization;
  RangeSource range_source = RangeSource::waveform_dynamic;
  double adc_min = 0.0;  // used only with adc_full_scale
  double adc_max = 0.0;

  void validate() const;
};

// Zero-mean / unit population-std rescale. Errors with ZeroVariance when the
// trace is constant within 1e-9 (a flat CCL trace means acquisition failed).
Waveform standardize(const Waveform& w);

// Affine map of [min, max] onto [0,1] or [-1,1]; the range comes from the
// waveform itself or from the ADC full-scale limits in the spec.
Waveform minmax_scale(const Waveform& w, const NormalizationSpec& spec);

// Dispatch on spec.kind.
Waveform normalize(const Waveform& w, const NormalizationSpec& spec);

double mean_of(const Waveform& w);
double population_std_of(const Waveform& w);

}  // namespace ccl

#endif  // CCL_WAVEFORM_HPP
