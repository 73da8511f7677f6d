#pragma once

#include "sampling.hpp"
#include "vec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ramlt {

// Lossless RGB image, row 0 at the top.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // 3 floats per pixel

    Image() = default;
    Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0.0f) {}

    float *pixel(int x, int y) { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
    const float *pixel(int x, int y) const {
        return &data[(static_cast<size_t>(y) * width + x) * 3];
    }
};

// Accumulation buffer for one chain (or the reduced total). Not thread
// safe; per-chain films are reduced after the run.
class Film {
public:
    Film() = default;
    Film(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    // Adds an RGB weight at a canonical screen position (v = 0 bottom).
    void add(const CanonicalPoint2 &raster, const Vec3 &value);

    void merge(const Film &other);

    double total_luminance() const { return total_luminance_; }

    // final image = scale * buffer
    Image to_image(double scale) const;

private:
    int width_ = 0, height_ = 0;
    std::vector<double> accum_;
    double total_luminance_ = 0.0;
};

} // namespace ramlt
