#include "film.hpp"

#include "check.hpp"

#include <algorithm>

namespace ramlt {

Film::Film(int width, int height)
    : width_(width), height_(height), accum_(static_cast<size_t>(width) * height * 3, 0.0) {}

void Film::add(const CanonicalPoint2 &raster, const Vec3 &value) {
    int x = std::min(static_cast<int>(raster.u * width_), width_ - 1);
    int row = height_ - 1 - std::min(static_cast<int>(raster.v * height_), height_ - 1);
    double *px = &accum_[(static_cast<size_t>(row) * width_ + x) * 3];
    px[0] += value.x;
    px[1] += value.y;
    px[2] += value.z;
    total_luminance_ += luminance(value);
}

void Film::merge(const Film &other) {
    RAMLT_CHECK(other.width_ == width_ && other.height_ == height_, "film size mismatch");
    for (size_t i = 0; i < accum_.size(); ++i)
        accum_[i] += other.accum_[i];
    total_luminance_ += other.total_luminance_;
}

Image Film::to_image(double scale) const {
    Image img(width_, height_);
    for (size_t i = 0; i < accum_.size(); ++i)
        img.data[i] = static_cast<float>(accum_[i] * scale);
    return img;
}

} // namespace ramlt
