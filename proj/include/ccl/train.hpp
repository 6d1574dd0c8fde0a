#ifndef CCL_TRAIN_HPP
#define CCL_TRAIN_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ccl/adam.hpp"
#include "ccl/dataset.hpp"
#include "ccl/model.hpp"

namespace ccl {

struct TrainConfig {
  Arch arch = Arch::TAN;
  int window_len = 512;
  int batch_size = 16;
  int epochs = 100;
  AdamConfig optimizer;
  NormalizationSpec normalization;
  LabelConfig labels;
  AugmentSpec augment;  // augment.seed is derived from `seed`, not used as-is
  double split_fraction = 0.75;
  std::uint64_t seed = 0;
  std::filesystem::path checkpoint_dir;  // empty: keep checkpoints in memory
  std::filesystem::path metrics_path;    // empty: no CSV
  int workers = 1;
  std::function<void(const struct MetricsRow&)> on_epoch;  // progress hook

  void validate() const;
};

struct MetricsRow {
  int epoch = 0;  // 1-based
  double train_ce = 0.0;
  double val_ce = 0.0;
  double val_f1 = 0.0;
  double val_auc_pr = 0.0;
};

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows);
std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);

struct TrainResult {
  ModelParams<float> final_params;
  ModelParams<float> best_params;  // highest val_f1, later epoch wins ties
  std::vector<MetricsRow> metrics;
  int best_epoch = 0;
  double best_val_f1 = 0.0;
  std::int64_t skipped_marks = 0;
  std::filesystem::path best_checkpoint, last_checkpoint;  // set if dir given
};

// The full protocol: dataset assembly (3:1 whole-waveform split), minibatch
// Adam on BCE for cfg.epochs with a fresh seeded shuffle per epoch, and
// per-epoch validation (CE, F1 at 0.5/0.5, AUC-PR). Deterministic for a given
// cfg.seed; workers never change the result, only the wall clock.
TrainResult train(const TrainConfig& cfg, const std::vector<Waveform>& wells);

}  // namespace ccl

#endif  // CCL_TRAIN_HPP
