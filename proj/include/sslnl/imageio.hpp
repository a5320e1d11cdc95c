#pragma once

#include <string>

#include "sslnl/image.hpp"

namespace sslnl {

// Reads a PNG or JPEG file (sniffed by magic bytes) into a float image in
// [0,1]. Grayscale stays 1-channel, everything else lands as 3-channel RGB.
Image load_image(const std::string& path);

// 8-bit PNG; 1-channel gray or 3-channel RGB. Values clamped to [0,1].
void save_png(const std::string& path, const Image& img);

} // namespace sslnl
