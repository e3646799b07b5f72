#pragma once

#include <filesystem>

#include "fm2s/image.hpp"

namespace fm2s {

// Reads an 8- or 16-bit grayscale PNG or TIFF (format sniffed from the
// file header). Multi-directory TIFF stacks load one channel per plane.
// Intensities are divided by 2^depth - 1. Throws IoError for unreadable
// files or unsupported sample formats (the message names the format).
Image load_image(const std::filesystem::path& path);

// Writes PNG or TIFF chosen by extension (.png, .tif, .tiff). Values
// are clipped to [0,1] and quantized round-half-away-from-zero at the
// image's source depth. channels > 1 requires TIFF (one directory per
// channel). Throws IoError on unwritable paths.
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace fm2s
