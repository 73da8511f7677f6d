#pragma once

#include "sampling.hpp"
#include "vec.hpp"

#include <optional>

namespace ramlt {

// Pinhole camera. Canonical screen coordinates (u,v) in [0,1]^2 map to the
// view frustum; v = 0 is the bottom of the image. Sensor response is scaled
// so that a pixel directly viewing a surface of radiance L reads L under
// the one-pixel box reconstruction filter.
class Camera {
public:
    Camera() = default;
    Camera(const Vec3 &position, const Vec3 &look_at, const Vec3 &up, double fov_deg);

    // Sets image resolution; fixes the aspect ratio and the sensor scale.
    // Must be called before rendering.
    void configure_image(int width, int height);

    const Vec3 &position() const { return position_; }
    const Vec3 &forward() const { return forward_; }
    double fov_deg() const { return fov_deg_; }
    int width() const { return width_; }
    int height() const { return height_; }

    // Direction of the primary ray through canonical screen point (u,v).
    Vec3 primary_direction(double u, double v) const;

    // Inverts primary_direction; empty when the direction leaves the
    // view frustum.
    std::optional<CanonicalPoint2> raster_position(const Vec3 &omega) const;

    // Importance in area-measure path-integral convention: pairs with the
    // geometry term of the first path segment. Zero outside the frustum.
    double importance(const Vec3 &omega) const;

    // Density per solid angle of a primary direction sampled from uniform
    // canonical (u,v). Zero outside the frustum.
    double direction_pdf(const Vec3 &omega) const;

private:
    Vec3 position_;
    Vec3 right_{1.0, 0.0, 0.0}, up_{0.0, 1.0, 0.0}, forward_{0.0, 0.0, 1.0};
    double fov_deg_ = 60.0;
    double tan_half_fov_ = 0.0;
    int width_ = 0, height_ = 0;
    double aspect_ = 1.0;
    double plane_area_ = 0.0;  // image plane area at unit distance
    double sensor_scale_ = 1.0;
};

} // namespace ramlt
