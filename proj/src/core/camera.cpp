#include "camera.hpp"

#include <cmath>
#include <stdexcept>

namespace ramlt {

Camera::Camera(const Vec3 &position, const Vec3 &look_at, const Vec3 &up, double fov_deg)
    : position_(position), fov_deg_(fov_deg) {
    if (!(fov_deg > 0.0 && fov_deg < 180.0))
        throw std::invalid_argument("camera: fov must be in (0, 180) degrees");
    forward_ = normalize(look_at - position);
    Vec3 r = cross(forward_, up);
    if (length(r) < 1e-12)
        throw std::invalid_argument("camera: up vector is parallel to the view direction");
    right_ = normalize(r);
    up_ = cross(right_, forward_);
    tan_half_fov_ = std::tan(0.5 * fov_deg_ * kPi / 180.0);
    configure_image(1, 1);
}

void Camera::configure_image(int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("camera: resolution must be positive");
    width_ = width;
    height_ = height;
    aspect_ = static_cast<double>(width) / static_cast<double>(height);
    plane_area_ = 4.0 * tan_half_fov_ * tan_half_fov_ * aspect_;
    sensor_scale_ = static_cast<double>(width) * static_cast<double>(height) / plane_area_;
}

Vec3 Camera::primary_direction(double u, double v) const {
    double px = (2.0 * u - 1.0) * tan_half_fov_ * aspect_;
    double py = (2.0 * v - 1.0) * tan_half_fov_;
    return normalize(px * right_ + py * up_ + forward_);
}

std::optional<CanonicalPoint2> Camera::raster_position(const Vec3 &omega) const {
    double cos_theta = dot(omega, forward_);
    if (cos_theta <= 0.0)
        return std::nullopt;
    double px = dot(omega, right_) / cos_theta;
    double py = dot(omega, up_) / cos_theta;
    double u = 0.5 * (px / (tan_half_fov_ * aspect_) + 1.0);
    double v = 0.5 * (py / tan_half_fov_ + 1.0);
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
        return std::nullopt;
    return CanonicalPoint2{u, v};
}

double Camera::importance(const Vec3 &omega) const {
    if (!raster_position(omega))
        return 0.0;
    double cos_theta = dot(omega, forward_);
    double c2 = cos_theta * cos_theta;
    return sensor_scale_ / (c2 * c2);
}

double Camera::direction_pdf(const Vec3 &omega) const {
    if (!raster_position(omega))
        return 0.0;
    double cos_theta = dot(omega, forward_);
    return 1.0 / (plane_area_ * cos_theta * cos_theta * cos_theta);
}

} // namespace ramlt
