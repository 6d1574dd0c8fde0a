#ifndef CCL_AUGMENT_HPP
#define CCL_AUGMENT_HPP

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "ccl/errors.hpp"
#include "ccl/rng.hpp"

namespace ccl {

// Identifies where a segment came from; part of the per-draw seed so that
// augmentation results do not depend on worker count or call order.
struct Provenance {
  std::uint64_t well_id = 0;
  std::int64_t offset = 0;  // segment start in the source waveform
};

// A contiguous slice of a waveform with marks re-indexed to the slice.
// Samples are double here: augmentation math runs at full precision and is
// only narrowed to f32 when windows become network inputs.
struct Segment {
  Eigen::VectorXd samples;
  std::vector<std::int64_t> marks;
  Provenance provenance;
};

enum class CropMode { random, fixed_center };

struct AugmentSpec {
  // lo == hi means the transform is disabled (identity draw).
  std::array<double, 2> time_scale_range{1.0, 1.0};
  CropMode crop = CropMode::random;
  int window_len = 512;
  std::array<double, 2> amp_jitter_range{1.0, 1.0};
  double noise_sigma = 0.0;  // fraction of segment std; 0 disables
  int multi_sampling = 1;    // M
  std::uint64_t seed = 0;
  // Random crops keep at least one mark this far from both window edges
  // (3 sigma of the default label smoothing width).
  int crop_margin = 30;

  void validate() const;
};

// Conventional ranges for the transforms when they are switched on.
inline constexpr std::array<double, 2> kTimeScaleOn{0.8, 1.25};
inline constexpr std::array<double, 2> kAmpJitterOn{0.7, 1.3};

// Bandlimited rescale along the time axis: out[j] = in(j / factor) via
// truncated Whittaker-Shannon interpolation (64-tap Hann-tapered sinc,
// taps renormalized to unit DC gain). Marks map to round(factor * t).
Segment time_scale(const Segment& seg, double factor);

// Cut a window_len slice. random: uniform over offsets that keep a mark at
// least crop_margin samples inside the window; fixed_center: the mark
// nearest the segment center lands exactly at window_len / 2.
Segment crop(const Segment& seg, const AugmentSpec& spec, SplitMix64& rng);

Segment amp_jitter(const Segment& seg, double gain);

// Adds N(0, (sigma * std(seg))^2) per sample.
Segment noise_inject(const Segment& seg, double sigma, SplitMix64& rng);

// M draws of the chain time_scale -> crop -> amp_jitter -> noise_inject.
// Draw k is seeded by mix64(spec.seed, provenance, k), so the result is a
// pure function of (spec, segment) regardless of execution order.
std::vector<Segment> sample_many(const Segment& seg, const AugmentSpec& spec);

// Single draw k of the chain; sample_many loops over this.
Segment sample_one(const Segment& seg, const AugmentSpec& spec, int draw_index);

}  // namespace ccl

#endif  // CCL_AUGMENT_HPP
