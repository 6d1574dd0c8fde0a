#ifndef CCL_WAVEFORM_IO_HPP
#define CCL_WAVEFORM_IO_HPP

#include <filesystem>
#include <string>

#include "ccl/waveform.hpp"

namespace ccl {

// CCLW on-disk format: "<stem>.json" manifest + "<stem>.bin" raw f32le
// payload. The stem argument is the shared path without extension.
Waveform read_waveform(const std::filesystem::path& stem);
void write_waveform(const Waveform& w, const std::filesystem::path& stem);

// Plain-text import: values separated by commas and/or newlines.
Waveform read_csv_waveform(const std::filesystem::path& path,
                           double sample_rate_hz);

}  // namespace ccl

#endif  // CCL_WAVEFORM_IO_HPP
