#pragma once

#include <filesystem>
#include <string>

#include "pdsplit/imaging.hpp"

namespace pdsplit {

// Reads P2/P5 (grayscale) and P3/P6 (color) files with any maxval up to 65535.
// Scanlines are row-major; pixels are rescaled to [0, 1] and stored
// column-major per channel. Throws io_error.
Image read_pnm(const std::filesystem::path& path);
Image parse_pnm(const std::string& bytes);

// Writes binary P5 (one channel) or P6 (three channels) with maxval 255.
// Values are clamped to [0, 1] and quantized as round(v * 255).
void write_pnm(const std::filesystem::path& path, const Image& img);
std::string encode_pnm(const Image& img);

}  // namespace pdsplit
