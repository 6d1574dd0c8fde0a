#ifndef CCL_DATASET_HPP
#define CCL_DATASET_HPP

#include <cstdint>
#include <vector>

#include "ccl/augment.hpp"
#include "ccl/labels.hpp"
#include "ccl/waveform.hpp"

namespace ccl {

struct LabelConfig {
  LabelKind kind = LabelKind::lds;
  LdsConfig lds;  // sigma, used by the lds kinds
  LsrConfig lsr;  // epsilon, used by the *_lsr kinds
};

LabelMap make_labels(const std::vector<std::int64_t>& marks, Eigen::Index len,
                     const LabelConfig& cfg);

struct SampleWindow {
  Eigen::VectorXf samples;
  LabelMap labels;
};

struct DatasetSplit {
  std::vector<SampleWindow> train, val;
  std::vector<std::size_t> train_wells, val_wells;  // indices into the input
  std::int64_t skipped_marks = 0;  // marks whose 2W segment left the waveform
};

// Turns annotated waveforms into augmented training windows:
//   1. normalize each full waveform;
//   2. cut a centered 2W segment around every collar mark (marks too close to
//      an edge are skipped and counted);
//   3. draw aug.multi_sampling augmented windows per segment;
//   4. label each window from its window-relative marks.
// The train/val split is by whole waveform (seeded shuffle, split_fraction of
// the wells train), so validation windows never come from training wells.
// Windows keep a fixed order (well, mark, draw); workers only parallelize
// independent per-well work.
DatasetSplit build_dataset(const std::vector<Waveform>& wells,
                           const NormalizationSpec& norm,
                           const LabelConfig& labels, const AugmentSpec& aug,
                           double split_fraction, std::uint64_t seed,
                           int workers = 1);

}  // namespace ccl

#endif  // CCL_DATASET_HPP
