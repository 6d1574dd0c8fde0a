#include "ccl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccl/errors.hpp"
#include "ccl/rng.hpp"

namespace ccl {

namespace {

// sub-stream tags so that e.g. changing the interference tier does not
// reshuffle the collar positions of the same seed
enum : std::uint64_t {
  kStreamMarks = 1,
  kStreamWidths = 2,
  kStreamInterference = 3,
  kStreamDrift = 4,
  kStreamNoise = 5,
  kStreamSaturation = 6,
};

constexpr double kWidthJitterLo = 0.9;   // per-collar lobe width spread
constexpr double kWidthJitterHi = 1.1;
constexpr double kSignatureSpan = 6.0;   // render out to 6 lobe widths
constexpr double kFullScale = 1.5;       // full scale in units of A
constexpr double kSaturationProb = 0.25; // moderate: fraction of boosted collars

}  // namespace

double collar_signature(double t, double width, double amp) {
  return amp * (t / width) * std::exp(-t * t / (2.0 * width * width));
}

void SynthSpec::validate() const {
  if (!(sample_rate_hz > 0.0)) throw SpecInvalid("sample_rate_hz must be > 0");
  if (!(duration_s > 0.0)) throw SpecInvalid("duration_s must be > 0");
  if (!(collar_spacing_s > 0.0)) throw SpecInvalid("collar_spacing_s must be > 0");
  if (!(signature_width_s > 0.0)) throw SpecInvalid("signature_width_s must be > 0");
  if (!(signature_amp > 0.0)) throw SpecInvalid("signature_amp must be > 0");
  if (drift_amp < 0.0) throw SpecInvalid("drift_amp must be >= 0");
  if (noise_std < 0.0) throw SpecInvalid("noise_std must be >= 0");
  if (duration_s * sample_rate_hz < 4.0 * 512.0)
    throw SpecInvalid("waveform must cover at least four default windows");
  if (!(collar_spacing_s > 8.0 * signature_width_s))
    throw SpecInvalid("collar_spacing_s must exceed 8 * signature_width_s");
}

Waveform generate(const SynthSpec& spec) {
  spec.validate();

  const double rate = spec.sample_rate_hz;
  const std::int64_t n = std::llround(spec.duration_s * rate);
  const double amp = spec.signature_amp;

  // Collar positions: jittered regular grid. +/-0.095 spacing of grid jitter
  // bounds consecutive gaps to [0.81, 1.19] of the mean, which also bounds
  // the rounded sample gaps above 0.8 * spacing.
  SplitMix64 rng_marks(mix64(spec.seed, kStreamMarks));
  const int n_collars =
      std::max<int>(1, int(spec.duration_s / spec.collar_spacing_s));
  std::vector<std::int64_t> marks;
  std::vector<double> mark_times;
  for (int i = 0; i < n_collars; ++i) {
    const double jitter = rng_marks.uniform(-0.095, 0.095);
    const double t = (double(i) + 0.5 + jitter) * spec.collar_spacing_s;
    mark_times.push_back(t);
    marks.push_back(std::llround(t * rate));
  }

  SplitMix64 rng_widths(mix64(spec.seed, kStreamWidths));
  std::vector<double> widths;
  for (int i = 0; i < n_collars; ++i)
    widths.push_back(spec.signature_width_s * rate *
                     rng_widths.uniform(kWidthJitterLo, kWidthJitterHi));

  std::vector<double> boost(n_collars, 1.0);
  if (spec.interference == Interference::moderate) {
    SplitMix64 rng_sat(mix64(spec.seed, kStreamSaturation));
    for (int i = 0; i < n_collars; ++i)
      if (rng_sat.uniform01() < kSaturationProb)
        boost[i] = rng_sat.uniform(2.4, 3.4);
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);

  // collar signatures, truncated at kSignatureSpan lobe widths
  for (int i = 0; i < n_collars; ++i) {
    const std::int64_t c = marks[i];
    const double w = widths[i];
    const std::int64_t span = std::int64_t(std::ceil(kSignatureSpan * w));
    const std::int64_t lo = std::max<std::int64_t>(0, c - span);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, c + span);
    for (std::int64_t t = lo; t <= hi; ++t)
      acc[t] += collar_signature(double(t - c), w, amp * boost[i]);
  }

  // unimodal interference bumps, kept away from every collar. Bumps are
  // broader and weaker than a collar lobe: a disturbance on the baseline, not
  // a second pulse population.
  if (spec.interference != Interference::none) {
    SplitMix64 rng_i(mix64(spec.seed, kStreamInterference));
    const bool moderate = spec.interference == Interference::moderate;
    const double bumps_per_collar = moderate ? 0.9 : 0.6;
    const double amp_lo = moderate ? 0.2 : 0.08;
    const double amp_hi = moderate ? 0.45 : 0.25;
    const int n_bumps = int(std::llround(bumps_per_collar * n_collars));
    const double w_nom = spec.signature_width_s * rate;

    int placed = 0, attempts = 0;
    while (placed < n_bumps && attempts < 100 * (n_bumps + 1)) {
      ++attempts;
      const double wb = w_nom * rng_i.uniform(1.5, 3.0);
      // "distant from casing collars": the bump core must not lap a collar
      const double keep_out = 4.0 * w_nom + 2.0 * wb;
      const double p = rng_i.uniform(0.0, double(n - 1));
      auto it = std::lower_bound(marks.begin(), marks.end(),
                                 std::int64_t(std::llround(p)));
      bool clear = true;
      if (it != marks.end() && double(*it) - p < keep_out) clear = false;
      if (it != marks.begin() && p - double(*(it - 1)) < keep_out) clear = false;
      if (!clear) continue;

      const double a =
          (rng_i.uniform01() < 0.5 ? -1.0 : 1.0) * amp * rng_i.uniform(amp_lo, amp_hi);
      const std::int64_t span = std::int64_t(std::ceil(4.0 * wb));
      const std::int64_t lo = std::max<std::int64_t>(0, std::llround(p) - span);
      const std::int64_t hi = std::min<std::int64_t>(n - 1, std::llround(p) + span);
      for (std::int64_t t = lo; t <= hi; ++t) {
        const double d = double(t) - p;
        acc[t] += a * std::exp(-d * d / (2.0 * wb * wb));
      }
      ++placed;
    }
  }

  if (spec.drift_amp > 0.0) {
    SplitMix64 rng_d(mix64(spec.seed, kStreamDrift));
    double f[3], ph[3];
    for (int h = 0; h < 3; ++h) {
      f[h] = rng_d.uniform(0.01, 0.05);
      ph[h] = rng_d.uniform(0.0, 2.0 * M_PI);
    }
    const double norm = 1.0 + 0.5 + 1.0 / 3.0;
    for (std::int64_t t = 0; t < n; ++t) {
      const double ts = double(t) / rate;
      double d = 0.0;
      for (int h = 0; h < 3; ++h)
        d += std::sin(2.0 * M_PI * f[h] * ts + ph[h]) / double(h + 1);
      acc[t] += spec.drift_amp * d / norm;
    }
  }

  if (spec.noise_std > 0.0) {
    SplitMix64 rng_n(mix64(spec.seed, kStreamNoise));
    for (std::int64_t t = 0; t < n; ++t) acc[t] += spec.noise_std * rng_n.normal();
  }

  // moderate tier: amplifier saturation against the simulated full scale
  if (spec.interference == Interference::moderate) {
    const double clip = 0.9 * kFullScale * amp;
    acc = acc.cwiseMax(-clip).cwiseMin(clip);
  }

  Waveform w;
  w.sample_rate_hz = rate;
  w.samples = acc.cast<float>();
  w.collar_marks = std::move(marks);
  w.validate();
  return w;
}

}  // namespace ccl
