#include "ccl/waveform.hpp"

#include <cmath>
#include <string>

#include "ccl/errors.hpp"

namespace ccl {

namespace {
constexpr double kTol = 1e-9;
}

void Waveform::validate() const {
  if (samples.size() == 0) throw SpecInvalid("waveform has no samples");
  if (!(sample_rate_hz > 0.0)) throw SpecInvalid("sample_rate_hz must be > 0");
  for (std::size_t i = 0; i < collar_marks.size(); ++i) {
    const auto m = collar_marks[i];
    if (m < 0 || m >= samples.size())
      throw SpecInvalid("collar mark " + std::to_string(m) + " out of range");
    if (i > 0 && collar_marks[i - 1] >= m)
      throw SpecInvalid("collar marks not strictly increasing");
  }
}

void NormalizationSpec::validate() const {
  if (range_source == RangeSource::adc_full_scale && !(adc_min < adc_max))
    throw SpecInvalid("adc_min must be < adc_max");
}

double mean_of(const Waveform& w) {
  return w.samples.cast<double>().mean();
}

double population_std_of(const Waveform& w) {
  const Eigen::VectorXd x = w.samples.cast<double>();
  const double mu = x.mean();
  return std::sqrt((x.array() - mu).square().mean());
}

Waveform standardize(const Waveform& w) {
  w.validate();
  const Eigen::VectorXd x = w.samples.cast<double>();
  const double mu = x.mean();
  const double sd = std::sqrt((x.array() - mu).square().mean());
  if (sd <= kTol) throw ZeroVariance("constant waveform cannot be standardized");

  Waveform out = w;
  out.samples = ((x.array() - mu) / sd).cast<float>();
  return out;
}

Waveform minmax_scale(const Waveform& w, const NormalizationSpec& spec) {
  w.validate();
  spec.validate();

  double lo_src, hi_src;
  if (spec.range_source == RangeSource::adc_full_scale) {
    lo_src = spec.adc_min;
    hi_src = spec.adc_max;
  } else {
    lo_src = w.samples.minCoeff();
    hi_src = w.samples.maxCoeff();
  }
  if (hi_src - lo_src <= kTol) throw ZeroRange("waveform range below tolerance");

  const double lo_dst = (spec.kind == NormKind::minmax_sym) ? -1.0 : 0.0;
  const double hi_dst = 1.0;

  Waveform out = w;
  const Eigen::ArrayXd x = w.samples.cast<double>().array();
  // (x-lo)/(hi-lo) hits 0 and 1 exactly at the endpoints; with an ADC range
  // source, samples outside full scale are clamped into the target interval.
  Eigen::ArrayXd t = (x - lo_src) / (hi_src - lo_src);
  t = t.max(0.0).min(1.0);
  out.samples = (lo_dst + t * (hi_dst - lo_dst)).cast<float>();
  return out;
}

Waveform normalize(const Waveform& w, const NormalizationSpec& spec) {
  if (spec.kind == NormKind::standardization) return standardize(w);
  return minmax_scale(w, spec);
}

}  // namespace ccl
