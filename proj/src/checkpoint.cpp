#include "ccl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ccl {

static_assert(std::endian::native == std::endian::little,
              "CCLM i/o assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'C', 'L', 'M'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw FormatError(std::string("checkpoint truncated at ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams<float>& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(params.desc.arch));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.desc.input_len));
  const auto names = tensor_names(params.desc);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(names.size()));
  for (const auto& name : names) {
    const Tensor<float>& t = params.at(name);
    put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank));
    for (int d = 0; d < t.rank; ++d)
      put<std::uint32_t>(os, static_cast<std::uint32_t>(t.dims[d]));
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.size() * sizeof(float)));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

ModelParams<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a CCLM checkpoint: " + path.string());
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version));
  const auto arch_id = get<std::uint8_t>(is, "arch");
  if (arch_id > 1)
    throw FormatError("unknown architecture id " + std::to_string(arch_id));
  const auto input_len = get<std::uint32_t>(is, "input_len");
  const auto count = get<std::uint32_t>(is, "tensor count");

  ModelParams<float> p;
  p.desc = build_arch(static_cast<Arch>(arch_id),
                      static_cast<Eigen::Index>(input_len));
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = get<std::uint16_t>(is, "name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw FormatError("checkpoint truncated at tensor name");
    const auto rank = get<std::uint8_t>(is, "rank");
    if (rank < 1 || rank > 3)
      throw FormatError("tensor " + name + ": unsupported rank " +
                        std::to_string(rank));
    std::array<Eigen::Index, 3> dims{1, 1, 1};
    Eigen::Index n = 1;
    for (int d = 0; d < rank; ++d) {
      dims[d] = get<std::uint32_t>(is, "dim");
      n *= dims[d];
    }
    Tensor<float> t;
    t.rank = rank;
    t.dims = dims;
    t.data.resize(n);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!is) throw FormatError("checkpoint truncated in tensor " + name);
    if (p.tensors.count(name))
      throw FormatError("duplicate tensor " + name);
    p.tensors[name] = std::move(t);
  }

  // The stored set must be exactly what the architecture defines.
  const auto expected = tensor_names(p.desc);
  if (expected.size() != p.tensors.size())
    throw FormatError("checkpoint carries " +
                      std::to_string(p.tensors.size()) + " tensors, expected " +
                      std::to_string(expected.size()));
  const auto ref = init_params<float>(p.desc, 0);
  for (const auto& name : expected) {
    auto it = p.tensors.find(name);
    if (it == p.tensors.end())
      throw FormatError("checkpoint missing tensor " + name);
    if (!it->second.same_shape(ref.at(name)))
      throw FormatError("tensor " + name + " has shape " +
                        it->second.shape_str() + ", expected " +
                        ref.at(name).shape_str());
  }
  return p;
}

}  // namespace ccl
