#include "ccl/train.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ccl/checkpoint.hpp"
#include "ccl/metrics.hpp"

namespace ccl {

namespace {

constexpr std::uint64_t kSeedAugment = 0x41554747ull;  // "AUGG"
constexpr std::uint64_t kSeedInit = 0x494e4954ull;     // "INIT"
constexpr std::uint64_t kSeedEpoch = 0x45504f43ull;    // "EPOC"

// Pack windows [base, base+b_n) into x [b_n,1,W] / y [b_n,W].
void fill_batch(const std::vector<SampleWindow>& windows,
                const std::vector<std::size_t>& order, std::size_t base,
                std::size_t b_n, int window_len, Tensor<float>& x,
                Tensor<float>& y) {
  x = Tensor<float>::zeros3(static_cast<Eigen::Index>(b_n), 1, window_len);
  y = Tensor<float>::zeros2(static_cast<Eigen::Index>(b_n), window_len);
  for (std::size_t b = 0; b < b_n; ++b) {
    const SampleWindow& sw = windows[order[base + b]];
    if (sw.samples.size() != window_len ||
        sw.labels.values.size() != window_len)
      throw ShapeMismatch("window size does not match the architecture");
    for (int i = 0; i < window_len; ++i) {
      x(static_cast<Eigen::Index>(b), 0, i) = sw.samples[i];
      y(static_cast<Eigen::Index>(b), i) =
          static_cast<float>(sw.labels.values[i]);
    }
  }
}

struct ValMetrics {
  double ce = 0.0, f1 = 0.0, auc = 0.0;
};

ValMetrics evaluate(const ModelParams<float>& params,
                    const std::vector<SampleWindow>& val, int batch_size,
                    int window_len) {
  ValMetrics vm;
  if (val.empty()) return vm;
  std::vector<std::size_t> order(val.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd probs(static_cast<Eigen::Index>(val.size()) * window_len);
  Eigen::VectorXd labels(probs.size());
  double loss_acc = 0.0;
  for (std::size_t base = 0; base < val.size();
       base += static_cast<std::size_t>(batch_size)) {
    const std::size_t b_n =
        std::min<std::size_t>(batch_size, val.size() - base);
    Tensor<float> x, y;
    fill_batch(val, order, base, b_n, window_len, x, y);
    Tensor<float> logits = forward_eval(params, x);
    BceResult<float> bce = bce_with_logits(logits, y);
    loss_acc += bce.loss * static_cast<double>(b_n);
    for (std::size_t b = 0; b < b_n; ++b)
      for (int i = 0; i < window_len; ++i) {
        const Eigen::Index at =
            static_cast<Eigen::Index>((base + b)) * window_len + i;
        const double z =
            static_cast<double>(logits(static_cast<Eigen::Index>(b), i));
        probs[at] = 1.0 / (1.0 + std::exp(-z));
        labels[at] =
            static_cast<double>(y(static_cast<Eigen::Index>(b), i));
      }
  }
  vm.ce = loss_acc / static_cast<double>(val.size());
  vm.f1 = classifier_f1(probs, labels);
  vm.auc = auc_pr(probs, labels);
  return vm;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ConfigError("split_fraction must lie in (0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (window_len < 1) throw ConfigError("window_len must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  augment.validate();
  if (augment.window_len != window_len)
    throw ConfigError("augment.window_len must equal window_len");
}

std::string metrics_csv_header() { return "epoch,train_ce,val_ce,val_f1,val_auc_pr"; }

std::string metrics_csv_line(const MetricsRow& row) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g", row.epoch,
                row.train_ce, row.val_ce, row.val_f1, row.val_auc_pr);
  return buf;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << metrics_csv_header() << "\n";
  for (const auto& r : rows) os << metrics_csv_line(r) << "\n";
  if (!os) throw IoError("write failed for " + path.string());
}

TrainResult train(const TrainConfig& cfg, const std::vector<Waveform>& wells) {
  cfg.validate();
  AugmentSpec aug = cfg.augment;
  aug.seed = mix64(cfg.seed, kSeedAugment);
  DatasetSplit ds = build_dataset(wells, cfg.normalization, cfg.labels, aug,
                                  cfg.split_fraction, cfg.seed, cfg.workers);
  if (ds.train.empty())
    throw ConfigError("dataset produced no training windows");

  const ArchDescriptor desc = build_arch(cfg.arch, cfg.window_len);
  ModelParams<float> params =
      init_params<float>(desc, mix64(cfg.seed, kSeedInit));
  AdamState<float> opt(cfg.optimizer);

  TrainResult result;
  result.skipped_marks = ds.skipped_marks;

  std::ofstream csv;
  if (!cfg.metrics_path.empty()) {
    csv.open(cfg.metrics_path);
    if (!csv)
      throw IoError("cannot open " + cfg.metrics_path.string() +
                    " for writing");
    csv << metrics_csv_header() << "\n" << std::flush;
  }

  std::vector<std::size_t> order(ds.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    SplitMix64 shuffle_rng(
        mix64(cfg.seed, kSeedEpoch, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_acc = 0.0;
    for (std::size_t base = 0; base < order.size();
         base += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t b_n =
          std::min<std::size_t>(cfg.batch_size, order.size() - base);
      Tensor<float> x, y;
      fill_batch(ds.train, order, base, b_n, cfg.window_len, x, y);
      Trace<float> trace;
      Tensor<float> logits = forward(params, x, RunMode::train, &trace);
      BceResult<float> bce = bce_with_logits(logits, y);
      loss_acc += bce.loss * static_cast<double>(b_n);
      ParamMap<float> grads = backward(params, trace, bce.dlogits);
      adam_step(params, grads, opt);
    }

    MetricsRow row;
    row.epoch = epoch;
    row.train_ce = loss_acc / static_cast<double>(order.size());
    const ValMetrics vm =
        evaluate(params, ds.val, cfg.batch_size, cfg.window_len);
    row.val_ce = vm.ce;
    row.val_f1 = vm.f1;
    row.val_auc_pr = vm.auc;
    result.metrics.push_back(row);
    if (csv.is_open()) csv << metrics_csv_line(row) << "\n" << std::flush;
    if (cfg.on_epoch) cfg.on_epoch(row);

    // Later epochs win ties so a collapsed model is judged as it ended up.
    if (epoch == 1 || row.val_f1 >= result.best_val_f1) {
      result.best_val_f1 = row.val_f1;
      result.best_epoch = epoch;
      result.best_params = params;
    }
  }
  result.final_params = std::move(params);

  if (!cfg.checkpoint_dir.empty()) {
    std::filesystem::create_directories(cfg.checkpoint_dir);
    result.best_checkpoint = cfg.checkpoint_dir / "best.cclm";
    result.last_checkpoint = cfg.checkpoint_dir / "last.cclm";
    save_checkpoint(result.best_checkpoint, result.best_params);
    save_checkpoint(result.last_checkpoint, result.final_params);
  }
  return result;
}

}  // namespace ccl
