#ifndef CCL_SYNTH_HPP
#define CCL_SYNTH_HPP

#include <cstdint>

#include "ccl/waveform.hpp"

namespace ccl {

enum class Interference { none, mild, moderate };

// Parameters of the seeded well-log generator. Collar signatures are
// antisymmetric two-lobed pulses (derivative-of-Gaussian); interference adds
// unimodal bumps away from collars, and the moderate tier additionally
// saturates a fraction of collars against the simulated full scale.
struct SynthSpec {
  std::uint64_t seed = 0;
  double duration_s = 600.0;
  double sample_rate_hz = 1000.0;
  double collar_spacing_s = 6.0;     // mean spacing, +/-20% uniform jitter
  double signature_width_s = 0.1;    // lobe width w of the collar pulse
  double signature_amp = 1.0;        // amplitude scale A
  Interference interference = Interference::none;
  double drift_amp = 0.0;            // baseline wander amplitude
  double noise_std = 0.0;            // sensor noise std, signal units

  void validate() const;  // throws SpecInvalid
};

// Deterministic in spec.seed; returns the trace with ground-truth marks at
// the signature zero crossings.
Waveform generate(const SynthSpec& spec);

// The collar pulse s(t) = A * (t/w) * exp(-t^2 / (2 w^2)), t in samples.
// Exposed for matched-filter style checks.
double collar_signature(double t, double width, double amp);

}  // namespace ccl

#endif  // CCL_SYNTH_HPP
