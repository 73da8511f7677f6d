#pragma once

#include "film.hpp"

#include <string>

namespace ramlt {

// PFM: header "PF\n<width> <height>\n-1.0\n", rows bottom to top, each pixel
// three little-endian 32-bit floats.
void write_pfm(const Image &image, const std::string &path);
Image read_pfm(const std::string &path);

// 8-bit PNG for inspection: exposure in stops, then gamma 2.2.
void write_png(const Image &image, const std::string &path, double exposure = 0.0);

// Raw 8-bit RGB PNG (no tonemapping), used for false-color maps.
void write_png_rgb8(const unsigned char *rgb, int width, int height, const std::string &path);

} // namespace ramlt
