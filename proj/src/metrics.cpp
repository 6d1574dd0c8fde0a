#include "ccl/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "ccl/errors.hpp"

namespace ccl {

double classifier_f1(const Eigen::Ref<const Eigen::VectorXd>& probs,
                     const Eigen::Ref<const Eigen::VectorXd>& labels,
                     double prob_threshold, double label_threshold) {
  if (probs.size() != labels.size())
    throw ShapeMismatch("classifier_f1: size mismatch");
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] > prob_threshold;
    const bool truth = labels[i] > label_threshold;
    if (pred && truth)
      ++tp;
    else if (pred)
      ++fp;
    else if (truth)
      ++fn;
  }
  const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  return precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
}

double auc_pr(const Eigen::Ref<const Eigen::VectorXd>& scores,
              const Eigen::Ref<const Eigen::VectorXd>& labels) {
  if (scores.size() != labels.size())
    throw ShapeMismatch("auc_pr: size mismatch");
  const Eigen::Index n = scores.size();
  std::int64_t total_pos = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (labels[i] > 0.5) ++total_pos;
  if (n == 0 || total_pos == 0) return 0.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] > scores[b];
  });

  double area = 0.0, prev_recall = 0.0;
  std::int64_t tp = 0, pred_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double thr = scores[order[i]];
    // absorb the whole tie group before measuring
    while (i < order.size() && scores[order[i]] == thr) {
      ++pred_pos;
      if (labels[order[i]] > 0.5) ++tp;
      ++i;
    }
    const double precision = double(tp) / double(pred_pos);
    const double recall = double(tp) / double(total_pos);
    area += precision * (recall - prev_recall);
    prev_recall = recall;
  }
  return area;
}

}  // namespace ccl
