#include "ccl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccl/errors.hpp"
#include "ccl/parallel.hpp"
#include "ccl/rng.hpp"

namespace ccl {

namespace {

constexpr std::uint64_t kSeedSplit = 0x53504c49ull;  // "SPLI"

}  // namespace

LabelMap make_labels(const std::vector<std::int64_t>& marks, Eigen::Index len,
                     const LabelConfig& cfg) {
  LabelMap m;
  switch (cfg.kind) {
    case LabelKind::ohe:
      m = ohe_labels(marks, len);
      break;
    case LabelKind::lds:
      m = lds_labels(marks, len, cfg.lds);
      break;
    case LabelKind::ohe_lsr:
      m = lsr_apply(ohe_labels(marks, len), cfg.lsr);
      break;
    case LabelKind::lds_lsr:
      m = lsr_apply(lds_labels(marks, len, cfg.lds), cfg.lsr);
      break;
  }
  return m;
}

DatasetSplit build_dataset(const std::vector<Waveform>& wells,
                           const NormalizationSpec& norm,
                           const LabelConfig& labels, const AugmentSpec& aug,
                           double split_fraction, std::uint64_t seed,
                           int workers) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ConfigError("split_fraction must lie in (0, 1)");
  aug.validate();
  for (const auto& w : wells) w.validate();
  if (wells.empty()) throw ConfigError("no waveforms given");

  const int window = aug.window_len;
  const std::int64_t segment_len = 2ll * window;

  // Per-well window production, slot-indexed so worker count cannot reorder.
  struct WellOut {
    std::vector<SampleWindow> windows;
    std::int64_t skipped = 0;
  };
  std::vector<WellOut> out(wells.size());
  parallel_for(wells.size(), workers, [&](std::size_t wi) {
    const Waveform& w = wells[wi];
    const Eigen::VectorXd normed =
        normalize(w, norm).samples.cast<double>();
    WellOut& o = out[wi];
    for (std::size_t mi = 0; mi < w.collar_marks.size(); ++mi) {
      const std::int64_t m = w.collar_marks[mi];
      const std::int64_t start = m - window;
      if (start < 0 || start + segment_len > normed.size()) {
        ++o.skipped;
        continue;
      }
      Segment seg;
      seg.samples = normed.segment(start, segment_len);
      for (const std::int64_t m2 : w.collar_marks)
        if (m2 >= start && m2 < start + segment_len)
          seg.marks.push_back(m2 - start);
      seg.provenance = Provenance{static_cast<std::uint64_t>(wi), start};
      std::vector<Segment> draws = sample_many(seg, aug);
      for (const Segment& d : draws) {
        SampleWindow sw;
        sw.samples = d.samples.cast<float>();
        sw.labels = make_labels(d.marks, d.samples.size(), labels);
        o.windows.push_back(std::move(sw));
      }
    }
  });

  // Whole-waveform split: shuffle well indices, first split_fraction train.
  std::vector<std::size_t> order(wells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(mix64(seed, kSeedSplit));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(split_fraction * static_cast<double>(wells.size())));
  n_train = std::clamp<std::size_t>(n_train, 1,
                                    std::max<std::size_t>(1, wells.size() - 1));

  DatasetSplit ds;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? ds.train_wells : ds.val_wells).push_back(order[i]);
  // Keep window order tied to the original well order, not the shuffle.
  std::sort(ds.train_wells.begin(), ds.train_wells.end());
  std::sort(ds.val_wells.begin(), ds.val_wells.end());
  for (const std::size_t wi : ds.train_wells)
    for (auto& sw : out[wi].windows) ds.train.push_back(std::move(sw));
  for (const std::size_t wi : ds.val_wells)
    for (auto& sw : out[wi].windows) ds.val.push_back(std::move(sw));
  for (const auto& o : out) ds.skipped_marks += o.skipped;
  return ds;
}

}  // namespace ccl
