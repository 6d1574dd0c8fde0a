#ifndef CCL_METRICS_HPP
#define CCL_METRICS_HPP

#include <Eigen/Core>

namespace ccl {

// Per-sample F1: probabilities and soft labels are both binarized with a
// strict > threshold (default 0.5). Empty input or no positives on either
// side gives 0.
double classifier_f1(const Eigen::Ref<const Eigen::VectorXd>& probs,
                     const Eigen::Ref<const Eigen::VectorXd>& labels,
                     double prob_threshold = 0.5,
                     double label_threshold = 0.5);

// Area under the precision-recall curve by sweeping the distinct scores in
// descending order (score >= threshold counts as positive) and summing
// precision * recall-increment. Labels binarize at > 0.5. With no positive
// labels the area is 0; with all scores equal it degenerates to prevalence.
double auc_pr(const Eigen::Ref<const Eigen::VectorXd>& scores,
              const Eigen::Ref<const Eigen::VectorXd>& labels);

}  // namespace ccl

#endif  // CCL_METRICS_HPP
