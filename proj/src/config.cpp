#include "ccl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>

namespace ccl {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json* block(const json& root, const char* name) {
  auto it = root.find(name);
  if (it == root.end()) return nullptr;
  if (!it->is_object())
    throw ConfigError(std::string(name) + " must be an object");
  return &*it;
}

template <typename T>
void read_field(const json& obj, const char* key, const std::string& where,
                T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for ") + where + "." + key);
  }
}

void read_range(const json& obj, const char* key, const std::string& where,
                std::array<double, 2>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number())
    throw ConfigError(where + "." + key + " must be [lo, hi]");
  out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

NormKind norm_kind_from(const std::string& s) {
  if (s == "standardization") return NormKind::standardization;
  if (s == "minmax_01") return NormKind::minmax_01;
  if (s == "minmax_sym") return NormKind::minmax_sym;
  throw ConfigError("unknown normalization kind '" + s + "'");
}

RangeSource range_source_from(const std::string& s) {
  if (s == "waveform_dynamic") return RangeSource::waveform_dynamic;
  if (s == "adc_full_scale") return RangeSource::adc_full_scale;
  throw ConfigError("unknown range_source '" + s + "'");
}

CropMode crop_mode_from(const std::string& s) {
  if (s == "random") return CropMode::random;
  if (s == "fixed_center") return CropMode::fixed_center;
  throw ConfigError("unknown crop mode '" + s + "'");
}

}  // namespace

CliConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(root, "config",
                 {"normalization", "labels", "augment", "arch", "train",
                  "inference"});

  CliConfig cfg;
  TrainConfig& t = cfg.train;

  if (const json* b = block(root, "normalization")) {
    reject_unknown(*b, "normalization",
                   {"kind", "range_source", "adc_min", "adc_max"});
    std::string kind, source;
    read_field(*b, "kind", "normalization", kind);
    read_field(*b, "range_source", "normalization", source);
    if (!kind.empty()) t.normalization.kind = norm_kind_from(kind);
    if (!source.empty())
      t.normalization.range_source = range_source_from(source);
    read_field(*b, "adc_min", "normalization", t.normalization.adc_min);
    read_field(*b, "adc_max", "normalization", t.normalization.adc_max);
  }

  if (const json* b = block(root, "labels")) {
    reject_unknown(*b, "labels", {"distribution", "sigma", "lsr_epsilon"});
    std::string dist = "lds";
    double lsr_eps = 0.0;
    if (t.labels.kind == LabelKind::ohe || t.labels.kind == LabelKind::ohe_lsr)
      dist = "ohe";
    read_field(*b, "distribution", "labels", dist);
    read_field(*b, "sigma", "labels", t.labels.lds.sigma);
    read_field(*b, "lsr_epsilon", "labels", lsr_eps);
    if (dist != "ohe" && dist != "lds")
      throw ConfigError("labels.distribution must be 'ohe' or 'lds'");
    if (lsr_eps > 0.0) {
      t.labels.lsr.epsilon = lsr_eps;
      t.labels.kind = dist == "ohe" ? LabelKind::ohe_lsr : LabelKind::lds_lsr;
    } else {
      t.labels.kind = dist == "ohe" ? LabelKind::ohe : LabelKind::lds;
    }
  }

  if (const json* b = block(root, "augment")) {
    reject_unknown(*b, "augment",
                   {"time_scale", "crop", "amp_jitter", "noise_sigma",
                    "multi_sampling", "crop_margin"});
    read_range(*b, "time_scale", "augment", t.augment.time_scale_range);
    read_range(*b, "amp_jitter", "augment", t.augment.amp_jitter_range);
    std::string crop;
    read_field(*b, "crop", "augment", crop);
    if (!crop.empty()) t.augment.crop = crop_mode_from(crop);
    read_field(*b, "noise_sigma", "augment", t.augment.noise_sigma);
    read_field(*b, "multi_sampling", "augment", t.augment.multi_sampling);
    read_field(*b, "crop_margin", "augment", t.augment.crop_margin);
  }

  if (const json* b = block(root, "arch")) {
    reject_unknown(*b, "arch", {"name"});
    std::string name;
    read_field(*b, "name", "arch", name);
    if (!name.empty()) t.arch = arch_from_name(name);
  }

  if (const json* b = block(root, "train")) {
    reject_unknown(*b, "train",
                   {"window_len", "batch_size", "epochs", "lr", "beta1",
                    "beta2", "eps", "split_fraction", "seed", "checkpoint_dir",
                    "metrics_path"});
    read_field(*b, "window_len", "train", t.window_len);
    read_field(*b, "batch_size", "train", t.batch_size);
    read_field(*b, "epochs", "train", t.epochs);
    read_field(*b, "lr", "train", t.optimizer.lr);
    read_field(*b, "beta1", "train", t.optimizer.beta1);
    read_field(*b, "beta2", "train", t.optimizer.beta2);
    read_field(*b, "eps", "train", t.optimizer.eps);
    read_field(*b, "split_fraction", "train", t.split_fraction);
    read_field(*b, "seed", "train", t.seed);
    std::string ckpt, metrics;
    read_field(*b, "checkpoint_dir", "train", ckpt);
    read_field(*b, "metrics_path", "train", metrics);
    if (!ckpt.empty()) t.checkpoint_dir = ckpt;
    if (!metrics.empty()) t.metrics_path = metrics;
  }

  if (const json* b = block(root, "inference")) {
    reject_unknown(*b, "inference", {"threshold", "min_width", "tolerance"});
    read_field(*b, "threshold", "inference", cfg.inference.threshold);
    read_field(*b, "min_width", "inference", cfg.inference.min_width);
    read_field(*b, "tolerance", "inference", cfg.inference.tolerance);
  }

  t.augment.window_len = t.window_len;
  return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace ccl
