#ifndef CCL_INFER_HPP
#define CCL_INFER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "ccl/model.hpp"
#include "ccl/waveform.hpp"

namespace ccl {

// Window start offsets for a length-n trace: stride W/2 from 0 while the
// window fits, plus a final right-aligned window if samples would be missed.
// n < W yields the single start 0 (callers pad).
std::vector<std::int64_t> window_starts(std::int64_t n, int window_len);

struct ProbabilityMap {
  Eigen::VectorXd values;  // one probability per sample
  int window_len = 0;
};

// A classifier stub for tests: maps one window [W] to per-sample
// probabilities [W].
using WindowClassifier =
    std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&)>;

// Full-trace probability map: run the classifier over the sliding windows and
// average the outputs of every window covering a sample. Traces shorter than
// W are edge-replicated to W with the payload centered, and the map
// truncated back.
ProbabilityMap sliding_infer_with(const WindowClassifier& classify,
                                  const Eigen::Ref<const Eigen::VectorXd>&
                                      samples,
                                  int window_len);

// Same, but the windows go through the network in eval mode (batched).
// Workers split the batches across threads; each batch writes its own rows,
// so the map is identical for any worker count.
ProbabilityMap sliding_infer(const ModelParams<float>& params,
                             const Eigen::Ref<const Eigen::VectorXd>& samples,
                             int batch_size = 16, int workers = 1);

struct Region {
  std::int64_t start = 0;
  std::int64_t end = 0;  // inclusive
  std::int64_t center = 0;
};

struct DetectionResult {
  std::vector<std::int64_t> collars;  // region centers, ascending
  std::vector<Region> regions;
  double threshold = 0.5;
  int min_width = 3;
};

// Maximal runs of probability strictly above threshold; runs shorter than
// min_width are dropped and each survivor reports its center
// floor((start+end)/2).
DetectionResult postprocess(const ProbabilityMap& map, double threshold = 0.5,
                            int min_width = 3);

struct MatchReport {
  std::int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::int64_t tolerance = 0;
};

// Greedy one-to-one matching: predictions in ascending order each take the
// nearest unmatched truth mark within +/- tolerance (ties -> the earlier
// mark). Both inputs must be strictly increasing.
MatchReport match_collars(const std::vector<std::int64_t>& predicted,
                          const std::vector<std::int64_t>& truth,
                          std::int64_t tolerance = 50);

}  // namespace ccl

#endif  // CCL_INFER_HPP
