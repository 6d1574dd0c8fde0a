#ifndef CCL_CONFIG_HPP
#define CCL_CONFIG_HPP

#include <filesystem>
#include <string>

#include "ccl/train.hpp"

namespace ccl {

struct InferenceConfig {
  double threshold = 0.5;
  int min_width = 3;
  std::int64_t tolerance = 50;
};

// One experiment bundle: everything train/infer/detect/eval need. Loaded from
// a JSON document with blocks {normalization, labels, augment, arch, train,
// inference}; every field is optional and unknown keys are rejected.
struct CliConfig {
  TrainConfig train;
  InferenceConfig inference;
};

CliConfig parse_config(const std::string& json_text);
CliConfig load_config(const std::filesystem::path& path);

}  // namespace ccl

#endif  // CCL_CONFIG_HPP
