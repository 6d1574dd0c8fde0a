#include "ccl/waveform_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccl/errors.hpp"

namespace ccl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// f32le on every supported target; static_assert guards the raw-byte I/O.
static_assert(sizeof(float) == 4);
static_assert(std::endian::native == std::endian::little,
              "CCLW payload I/O assumes a little-endian host");

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

}  // namespace

Waveform read_waveform(const fs::path& stem) {
  const fs::path jpath = with_ext(stem, ".json");
  const fs::path bpath = with_ext(stem, ".bin");

  std::ifstream jf(jpath);
  if (!jf) throw IoError("cannot open " + jpath.string());
  json manifest;
  try {
    jf >> manifest;
  } catch (const json::exception& e) {
    throw FormatError(jpath.string() + ": " + e.what());
  }

  if (!manifest.is_object() || manifest.value("format", "") != "cclw")
    throw FormatError(jpath.string() + ": not a cclw manifest");
  if (manifest.value("version", 0) != 1)
    throw FormatError(jpath.string() + ": unsupported cclw version");
  if (manifest.value("dtype", "") != "f32le")
    throw FormatError(jpath.string() + ": unsupported dtype");

  Waveform w;
  std::int64_t n = 0;
  try {
    w.sample_rate_hz = manifest.at("sample_rate_hz").get<double>();
    n = manifest.at("n_samples").get<std::int64_t>();
    for (const auto& m : manifest.at("collar_marks"))
      w.collar_marks.push_back(m.get<std::int64_t>());
  } catch (const json::exception& e) {
    throw FormatError(jpath.string() + ": " + e.what());
  }
  if (n <= 0) throw FormatError(jpath.string() + ": n_samples must be > 0");

  std::ifstream bf(bpath, std::ios::binary);
  if (!bf) throw IoError("cannot open " + bpath.string());
  bf.seekg(0, std::ios::end);
  const std::int64_t bytes = bf.tellg();
  bf.seekg(0);
  if (bytes != n * 4)
    throw FormatError(bpath.string() + ": payload is " + std::to_string(bytes) +
                      " bytes, manifest expects " + std::to_string(n * 4));

  w.samples.resize(n);
  bf.read(reinterpret_cast<char*>(w.samples.data()), n * 4);
  if (!bf) throw IoError("short read on " + bpath.string());

  w.validate();
  return w;
}

void write_waveform(const Waveform& w, const fs::path& stem) {
  w.validate();

  json manifest = {
      {"format", "cclw"},
      {"version", 1},
      {"sample_rate_hz", w.sample_rate_hz},
      {"n_samples", w.samples.size()},
      {"dtype", "f32le"},
      {"collar_marks", w.collar_marks},
  };

  std::ofstream jf(with_ext(stem, ".json"));
  if (!jf) throw IoError("cannot write " + with_ext(stem, ".json").string());
  jf << manifest.dump(2) << "\n";
  if (!jf) throw IoError("write failed on manifest for " + stem.string());

  std::ofstream bf(with_ext(stem, ".bin"), std::ios::binary);
  if (!bf) throw IoError("cannot write " + with_ext(stem, ".bin").string());
  bf.write(reinterpret_cast<const char*>(w.samples.data()),
           w.samples.size() * 4);
  if (!bf) throw IoError("write failed on payload for " + stem.string());
}

Waveform read_csv_waveform(const fs::path& path, double sample_rate_hz) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());

  std::vector<float> vals;
  std::string line;
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = tok.find_last_not_of(" \t\r");
      tok = tok.substr(b, e - b + 1);
      try {
        std::size_t used = 0;
        const float v = std::stof(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        vals.push_back(v);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad value '" + tok + "'");
      }
    }
  }
  if (vals.empty()) throw FormatError(path.string() + ": no samples");

  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples = Eigen::Map<const Eigen::VectorXf>(vals.data(), vals.size());
  w.validate();
  return w;
}

}  // namespace ccl
