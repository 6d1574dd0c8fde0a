#include "ccl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccl/errors.hpp"

namespace ccl {

namespace {

constexpr int kHalfTaps = 32;  // 64-tap interpolation window

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

// Hann-tapered sinc; zero outside |d| >= kHalfTaps.
double tap_weight(double d) {
  const double u = d / kHalfTaps;
  if (std::abs(u) >= 1.0) return 0.0;
  return sinc(d) * 0.5 * (1.0 + std::cos(M_PI * u));
}

}  // namespace

void AugmentSpec::validate() const {
  const auto& ts = time_scale_range;
  const auto& aj = amp_jitter_range;
  if (!(0.0 < ts[0] && ts[0] <= ts[1]))
    throw SpecInvalid("time_scale_range must satisfy 0 < lo <= hi");
  if (!(0.0 < aj[0] && aj[0] <= aj[1]))
    throw SpecInvalid("amp_jitter_range must satisfy 0 < lo <= hi");
  if (window_len < 2) throw SpecInvalid("window_len must be >= 2");
  if (multi_sampling < 1) throw SpecInvalid("multi_sampling must be >= 1");
  if (noise_sigma < 0.0) throw SpecInvalid("noise_sigma must be >= 0");
  if (crop_margin < 0) throw SpecInvalid("crop_margin must be >= 0");
}

Segment time_scale(const Segment& seg, double factor) {
  if (!(factor >= 0.5 && factor <= 2.0))
    throw FactorOutOfRange("time scale factor " + std::to_string(factor) +
                           " outside [0.5, 2.0]");
  const std::int64_t n = seg.samples.size();
  if (n < 16) throw SegmentTooShort("time_scale needs >= 16 samples");

  if (factor == 1.0) return seg;

  const std::int64_t out_len = std::llround(factor * double(n));
  Segment out;
  out.provenance = seg.provenance;
  out.samples.resize(out_len);

  for (std::int64_t j = 0; j < out_len; ++j) {
    const double c = double(j) / factor;
    const std::int64_t base = std::int64_t(std::floor(c));
    double acc = 0.0, wsum = 0.0;
    for (std::int64_t k = base - kHalfTaps + 1; k <= base + kHalfTaps; ++k) {
      if (k < 0 || k >= n) continue;
      const double w = tap_weight(c - double(k));
      acc += w * seg.samples[k];
      wsum += w;
    }
    out.samples[j] = wsum != 0.0 ? acc / wsum : 0.0;
  }

  out.marks.reserve(seg.marks.size());
  for (const auto m : seg.marks) {
    const auto mm = std::clamp<std::int64_t>(std::llround(factor * double(m)),
                                             0, out_len - 1);
    out.marks.push_back(mm);
  }
  return out;
}

Segment crop(const Segment& seg, const AugmentSpec& spec, SplitMix64& rng) {
  spec.validate();
  const std::int64_t n = seg.samples.size();
  const std::int64_t w = spec.window_len;
  if (n < w)
    throw SegmentTooShort("segment of " + std::to_string(n) +
                          " samples cannot yield a window of " +
                          std::to_string(w));

  std::int64_t offset = 0;
  if (spec.crop == CropMode::fixed_center) {
    if (seg.marks.empty()) {
      offset = (n - w) / 2;
    } else {
      // mark nearest the segment center goes to the window center
      const std::int64_t center = n / 2;
      std::int64_t best = seg.marks.front();
      for (const auto m : seg.marks)
        if (std::llabs(m - center) < std::llabs(best - center)) best = m;
      offset = std::clamp<std::int64_t>(best - w / 2, 0, n - w);
    }
  } else {
    // Valid offsets keep some mark >= crop_margin from both window edges.
    // Build the union of per-mark intervals; fall back to the full range
    // when the margins cannot be honored (e.g. n == w).
    std::vector<std::pair<std::int64_t, std::int64_t>> ivals;
    const std::int64_t margin = spec.crop_margin;
    for (const auto m : seg.marks) {
      const std::int64_t lo = std::max<std::int64_t>(0, m - w + 1 + margin);
      const std::int64_t hi = std::min<std::int64_t>(n - w, m - margin);
      if (lo <= hi) ivals.emplace_back(lo, hi);
    }
    if (ivals.empty()) ivals.emplace_back(0, n - w);
    std::sort(ivals.begin(), ivals.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> merged;
    for (const auto& iv : ivals) {
      if (!merged.empty() && iv.first <= merged.back().second + 1)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    std::int64_t total = 0;
    for (const auto& iv : merged) total += iv.second - iv.first + 1;
    std::int64_t r = std::int64_t(rng.below(std::uint64_t(total)));
    for (const auto& iv : merged) {
      const std::int64_t len = iv.second - iv.first + 1;
      if (r < len) {
        offset = iv.first + r;
        break;
      }
      r -= len;
    }
  }

  Segment out;
  out.provenance = seg.provenance;
  out.samples = seg.samples.segment(offset, w);
  for (const auto m : seg.marks)
    if (m >= offset && m < offset + w) out.marks.push_back(m - offset);
  return out;
}

Segment amp_jitter(const Segment& seg, double gain) {
  if (!(gain > 0.0)) throw NonPositiveGain("gain must be > 0");
  Segment out = seg;
  out.samples *= gain;
  return out;
}

Segment noise_inject(const Segment& seg, double sigma, SplitMix64& rng) {
  if (sigma < 0.0) throw SpecInvalid("noise sigma must be >= 0");
  if (sigma == 0.0) return seg;

  const double mu = seg.samples.mean();
  const double sd = std::sqrt((seg.samples.array() - mu).square().mean());
  const double scale = sigma * sd;

  Segment out = seg;
  for (std::int64_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += scale * rng.normal();
  return out;
}

Segment sample_one(const Segment& seg, const AugmentSpec& spec,
                   int draw_index) {
  spec.validate();
  SplitMix64 rng(mix64(spec.seed, seg.provenance.well_id,
                       std::uint64_t(seg.provenance.offset),
                       std::uint64_t(draw_index)));

  const auto& ts = spec.time_scale_range;
  Segment cur;
  if (ts[0] == ts[1]) {
    cur = ts[0] == 1.0 ? seg : time_scale(seg, ts[0]);
  } else {
    // log-uniform draw keeps stretch and compression symmetric
    const double f = std::exp(rng.uniform(std::log(ts[0]), std::log(ts[1])));
    cur = time_scale(seg, f);
  }

  cur = crop(cur, spec, rng);

  const auto& aj = spec.amp_jitter_range;
  if (aj[0] != aj[1])
    cur = amp_jitter(cur, rng.uniform(aj[0], aj[1]));
  else if (aj[0] != 1.0)
    cur = amp_jitter(cur, aj[0]);

  if (spec.noise_sigma > 0.0) cur = noise_inject(cur, spec.noise_sigma, rng);
  return cur;
}

std::vector<Segment> sample_many(const Segment& seg, const AugmentSpec& spec) {
  spec.validate();
  std::vector<Segment> out;
  out.reserve(spec.multi_sampling);
  for (int k = 0; k < spec.multi_sampling; ++k)
    out.push_back(sample_one(seg, spec, k));
  return out;
}

}  // namespace ccl
