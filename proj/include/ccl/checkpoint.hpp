#ifndef CCL_CHECKPOINT_HPP
#define CCL_CHECKPOINT_HPP

#include <filesystem>

#include "ccl/model.hpp"

namespace ccl {

// CCLM checkpoint container: "CCLM" magic, u32 version, u8 arch id, u32 input
// length, then a counted list of named f32 tensors. All integers little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams<float>& params);

// Rebuilds the architecture from the header and checks every tensor against
// it; wrong magic/version or a tensor set that does not match the
// architecture raises FormatError.
ModelParams<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace ccl

#endif  // CCL_CHECKPOINT_HPP
