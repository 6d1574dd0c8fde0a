// cclkit: casing-collar recognition pipeline as one binary.
//   synth  -> seeded synthetic CCL well (CCLW stem)
//   train  -> checkpoints + per-epoch metrics CSV
//   infer  -> per-sample probability map CSV
//   detect -> collar detections CSV from a map
//   eval   -> neighborhood-matched P/R/F1 report JSON
// Diagnostics go to stderr; data goes to the declared files or stdout.
// Exit codes: 0 ok, 2 usage/validation, 1 runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ccl/checkpoint.hpp"
#include "ccl/config.hpp"
#include "ccl/infer.hpp"
#include "ccl/synth.hpp"
#include "ccl/train.hpp"
#include "ccl/waveform_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Wells are the *.json manifests in the directory that have a .bin sibling,
// loaded in filename order so runs do not depend on directory iteration.
std::vector<ccl::Waveform> load_wells(const fs::path& dir) {
  std::vector<fs::path> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path p = entry.path();
    if (p.extension() != ".json") continue;
    fs::path stem = p;
    stem.replace_extension();
    if (fs::exists(stem.string() + ".bin")) stems.push_back(stem);
  }
  std::sort(stems.begin(), stems.end());
  std::vector<ccl::Waveform> wells;
  wells.reserve(stems.size());
  for (const auto& s : stems) wells.push_back(ccl::read_waveform(s));
  return wells;
}

// Writes to the path, or stdout when the path is empty.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw ccl::IoError("cannot open " + out_path + " for writing");
  os << text;
  if (!os) throw ccl::IoError("write failed for " + out_path);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ccl::IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ccl::FormatError(std::string("bad ") + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw ccl::FormatError(std::string("bad ") + what + " value '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const char* what) {
  const double v = parse_num(s, what);
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v)
    throw ccl::FormatError(std::string(what) + " value '" + s +
                           "' is not an integer");
  return i;
}

ccl::ProbabilityMap read_map_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "index,probability")
    throw ccl::FormatError(path.string() +
                           ": expected 'index,probability' header");
  ccl::ProbabilityMap map;
  map.values.resize(static_cast<Eigen::Index>(lines.size()) - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split_csv_row(lines[i]);
    if (cols.size() != 2)
      throw ccl::FormatError(path.string() + ": bad row '" + lines[i] + "'");
    const std::int64_t idx = parse_int(cols[0], "index");
    if (idx != static_cast<std::int64_t>(i) - 1)
      throw ccl::FormatError(path.string() + ": non-contiguous index " +
                             cols[0]);
    map.values[idx] = parse_num(cols[1], "probability");
  }
  return map;
}

std::vector<std::int64_t> read_detections_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "center,start,end")
    throw ccl::FormatError(path.string() +
                           ": expected 'center,start,end' header");
  std::vector<std::int64_t> centers;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split_csv_row(lines[i]);
    if (cols.size() != 3)
      throw ccl::FormatError(path.string() + ": bad row '" + lines[i] + "'");
    centers.push_back(parse_int(cols[0], "center"));
  }
  return centers;
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

ccl::CliConfig resolve_config(const CommonFlags& common) {
  ccl::CliConfig cfg;
  if (!common.config_path.empty())
    cfg = ccl::load_config(common.config_path);
  if (common.seed) cfg.train.seed = *common.seed;
  cfg.train.workers = common.workers;
  return cfg;
}

void add_common(CLI::App* sub, CommonFlags& common) {
  sub->add_option("--config", common.config_path,
                  "JSON config with blocks normalization/labels/augment/"
                  "arch/train/inference");
  sub->add_option("--seed", common.seed, "Override the config seed");
  sub->add_option("--workers", common.workers,
                  "Worker threads for independent work (results identical "
                  "for any value)")
      ->default_val(1);
}

int run_synth(const ccl::SynthSpec& spec, const std::string& out_stem) {
  spec.validate();
  const ccl::Waveform w = ccl::generate(spec);
  ccl::write_waveform(w, out_stem);
  std::cerr << "wrote " << out_stem << ".json/.bin: " << w.samples.size()
            << " samples, " << w.collar_marks.size() << " collar marks\n";
  return 0;
}

int run_train(const CommonFlags& common, const std::string& data_dir,
              const std::string& arch, int epochs, int batch_size, double lr,
              const std::string& checkpoint_dir,
              const std::string& metrics_path) {
  if (!fs::is_directory(data_dir)) {
    std::cerr << "error: data directory '" << data_dir << "' not found\n";
    return 2;
  }
  ccl::CliConfig cfg = resolve_config(common);
  if (!arch.empty()) cfg.train.arch = ccl::arch_from_name(arch);
  if (epochs > 0) cfg.train.epochs = epochs;
  if (batch_size > 0) cfg.train.batch_size = batch_size;
  if (lr > 0) cfg.train.optimizer.lr = lr;
  if (!checkpoint_dir.empty()) cfg.train.checkpoint_dir = checkpoint_dir;
  if (!metrics_path.empty()) cfg.train.metrics_path = metrics_path;
  if (cfg.train.checkpoint_dir.empty()) cfg.train.checkpoint_dir = "checkpoints";
  if (cfg.train.metrics_path.empty()) cfg.train.metrics_path = "metrics.csv";
  cfg.train.on_epoch = [&](const ccl::MetricsRow& r) {
    std::cerr << "epoch " << r.epoch << "/" << cfg.train.epochs
              << " train_ce=" << fmt_g(r.train_ce)
              << " val_ce=" << fmt_g(r.val_ce) << " val_f1=" << fmt_g(r.val_f1)
              << " val_auc_pr=" << fmt_g(r.val_auc_pr) << "\n";
  };

  const auto wells = load_wells(data_dir);
  if (wells.empty()) {
    std::cerr << "error: no CCLW waveforms in '" << data_dir << "'\n";
    return 2;
  }
  std::cerr << "loaded " << wells.size() << " waveforms from " << data_dir
            << "\n";
  const ccl::TrainResult result = ccl::train(cfg.train, wells);
  if (result.skipped_marks > 0)
    std::cerr << "warning: skipped " << result.skipped_marks
              << " marks too close to a waveform edge\n";
  std::cerr << "best val_f1 " << fmt_g(result.best_val_f1) << " at epoch "
            << result.best_epoch << "; wrote " << result.best_checkpoint
            << ", " << result.last_checkpoint << ", "
            << cfg.train.metrics_path << "\n";
  return 0;
}

int run_infer(const CommonFlags& common, const std::string& model_path,
              const std::string& input_stem, const std::string& out_path,
              int batch_size) {
  const ccl::CliConfig cfg = resolve_config(common);
  const ccl::ModelParams<float> params = ccl::load_checkpoint(model_path);
  const ccl::Waveform w = ccl::read_waveform(input_stem);
  const Eigen::VectorXd normed =
      ccl::normalize(w, cfg.train.normalization).samples.cast<double>();
  const ccl::ProbabilityMap map =
      ccl::sliding_infer(params, normed, batch_size, common.workers);
  std::string text = "index,probability\n";
  for (Eigen::Index i = 0; i < map.values.size(); ++i)
    text += std::to_string(i) + "," + fmt_g(map.values[i]) + "\n";
  emit(out_path, text);
  std::cerr << "probability map over " << map.values.size() << " samples\n";
  return 0;
}

int run_detect(const CommonFlags& common, const std::string& map_path,
               std::optional<double> threshold, std::optional<int> min_width,
               const std::string& out_path) {
  ccl::CliConfig cfg = resolve_config(common);
  if (threshold) cfg.inference.threshold = *threshold;
  if (min_width) cfg.inference.min_width = *min_width;
  const ccl::ProbabilityMap map = read_map_csv(map_path);
  const ccl::DetectionResult det =
      ccl::postprocess(map, cfg.inference.threshold, cfg.inference.min_width);
  std::string text = "center,start,end\n";
  for (const auto& r : det.regions)
    text += std::to_string(r.center) + "," + std::to_string(r.start) + "," +
            std::to_string(r.end) + "\n";
  emit(out_path, text);
  std::cerr << det.collars.size() << " detections at threshold "
            << fmt_g(det.threshold) << "\n";
  return 0;
}

int run_eval(const CommonFlags& common, const std::string& detections_path,
             const std::string& truth_stem, std::optional<std::int64_t> tol,
             const std::string& out_path) {
  ccl::CliConfig cfg = resolve_config(common);
  if (tol) cfg.inference.tolerance = *tol;
  const std::vector<std::int64_t> pred = read_detections_csv(detections_path);
  const ccl::Waveform truth = ccl::read_waveform(truth_stem);
  const ccl::MatchReport r =
      ccl::match_collars(pred, truth.collar_marks, cfg.inference.tolerance);
  nlohmann::json j{{"tp", r.tp},
                   {"fp", r.fp},
                   {"fn", r.fn},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"tolerance", r.tolerance}};
  emit(out_path, j.dump(2) + "\n");
  std::cerr << "tp=" << r.tp << " fp=" << r.fp << " fn=" << r.fn
            << " f1=" << fmt_g(r.f1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cclkit: casing-collar recognition toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic CCL well");
  ccl::SynthSpec spec;
  std::string synth_out;
  std::string interference = "none";
  synth->add_option("--seed", spec.seed, "Generator seed")->default_val(0);
  synth->add_option("--duration-s", spec.duration_s, "Trace length, seconds")
      ->default_val(600.0);
  synth->add_option("--sample-rate-hz", spec.sample_rate_hz, "Sample rate")
      ->default_val(1000.0);
  synth->add_option("--spacing-s", spec.collar_spacing_s,
                    "Mean collar spacing, seconds")
      ->default_val(6.0);
  synth->add_option("--signature-width-s", spec.signature_width_s,
                    "Collar signature lobe width, seconds")
      ->default_val(0.1);
  synth->add_option("--signature-amp", spec.signature_amp,
                    "Collar signature amplitude")
      ->default_val(1.0);
  synth
      ->add_option("--interference", interference,
                   "Interference tier: none, mild, moderate")
      ->default_val("none")
      ->check(CLI::IsMember({"none", "mild", "moderate"}));
  synth->add_option("--drift-amp", spec.drift_amp, "Baseline wander amplitude")
      ->default_val(0.0);
  synth->add_option("--noise-std", spec.noise_std, "Sensor noise std")
      ->default_val(0.0);
  synth->add_option("--out", synth_out, "Output stem (.json/.bin)")
      ->required();
  synth->callback([&] {
    spec.interference = interference == "mild"     ? ccl::Interference::mild
                        : interference == "moderate"
                            ? ccl::Interference::moderate
                            : ccl::Interference::none;
    rc = run_synth(spec, synth_out);
  });

  // train
  auto* train = app.add_subcommand("train", "Train a collar classifier");
  CommonFlags train_common;
  std::string data_dir, train_arch, ckpt_dir, metrics_path;
  int epochs = 0, batch_size = 0;
  double lr = 0;
  train->add_option("--data", data_dir, "Directory of CCLW waveforms")
      ->required();
  add_common(train, train_common);
  train->add_option("--arch", train_arch, "Architecture: TAN or MAN");
  train->add_option("--epochs", epochs, "Override epoch count");
  train->add_option("--batch-size", batch_size, "Override batch size");
  train->add_option("--lr", lr, "Override learning rate");
  train->add_option("--checkpoint-dir", ckpt_dir,
                    "Checkpoint directory (default checkpoints)");
  train->add_option("--metrics", metrics_path,
                    "Metrics CSV path (default metrics.csv)");
  train->callback([&] {
    rc = run_train(train_common, data_dir, train_arch, epochs, batch_size, lr,
                   ckpt_dir, metrics_path);
  });

  // infer
  auto* infer = app.add_subcommand(
      "infer", "Sliding-window probability map for a waveform");
  CommonFlags infer_common;
  std::string model_path, input_stem, infer_out;
  int infer_batch = 16;
  infer->add_option("--model", model_path, "CCLM checkpoint")->required();
  infer->add_option("--input", input_stem, "CCLW waveform stem")->required();
  infer->add_option("--out", infer_out, "Map CSV path (default stdout)");
  infer->add_option("--batch-size", infer_batch, "Windows per forward pass")
      ->default_val(16);
  add_common(infer, infer_common);
  infer->callback([&] {
    rc = run_infer(infer_common, model_path, input_stem, infer_out,
                   infer_batch);
  });

  // detect
  auto* detect =
      app.add_subcommand("detect", "Threshold a probability map into collars");
  CommonFlags detect_common;
  std::string map_path, detect_out;
  std::optional<double> threshold;
  std::optional<int> min_width;
  detect->add_option("--map", map_path, "Probability map CSV")->required();
  detect->add_option("--threshold", threshold,
                     "Detection threshold in (0,1) (default 0.5)");
  detect->add_option("--min-width", min_width,
                     "Minimum run length in samples (default 3)");
  detect->add_option("--out", detect_out,
                     "Detections CSV path (default stdout)");
  add_common(detect, detect_common);
  detect->callback([&] {
    rc = run_detect(detect_common, map_path, threshold, min_width, detect_out);
  });

  // eval
  auto* eval = app.add_subcommand(
      "eval", "Match detections against annotated collar marks");
  CommonFlags eval_common;
  std::string det_path, truth_stem, eval_out;
  std::optional<std::int64_t> tolerance;
  eval->add_option("--detections", det_path, "Detections CSV")->required();
  eval->add_option("--truth", truth_stem, "Annotated CCLW waveform stem")
      ->required();
  eval->add_option("--tolerance", tolerance,
                   "Match tolerance in samples (default 50)");
  eval->add_option("--out", eval_out, "Report JSON path (default stdout)");
  add_common(eval, eval_common);
  eval->callback([&] {
    rc = run_eval(eval_common, det_path, truth_stem, tolerance, eval_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const ccl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ccl::SpecInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ccl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
