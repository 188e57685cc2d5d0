#pragma once

#include <filesystem>

#include "lexikit/image.hpp"

namespace lexikit {

// Decodes an 8-bit PNG. Palette images are expanded to RGB; 16-bit channels
// are stripped to 8. Channel count is whatever the file carries (1..4).
// Throws IoError on missing/undecodable files.
Raster read_png(const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG. Output bytes are deterministic for a given
// image. Throws IoError on failure.
void write_png_gray(const std::filesystem::path& path, const GrayImage& img);

}  // namespace lexikit
