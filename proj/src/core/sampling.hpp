#pragma once

#include "rng.hpp"
#include "vec.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace ramlt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInvPi = std::numbers::inv_pi;

// Standard normal density and distribution function.
double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of normal_cdf, accurate to full double precision on (0, 1).
double normal_quantile(double p);

// Point in the canonical unit square [0,1]^2.
struct CanonicalPoint2 {
    double u = 0.0;
    double v = 0.0;
};

// Zero-centered normal on [-pi, pi] with scale sigma, used as the polar
// offset distribution of the directional perturbation kernel.
class AngularKernel {
public:
    explicit AngularKernel(double sigma);

    double sigma() const { return sigma_; }

    // Draws a polar offset in [-pi, pi] by inverse-CDF sampling.
    double sample(RandomSequence &rng) const;

    // Density per radian; zero outside [-pi, pi].
    double pdf(double theta) const;

    // Density per solid angle of proposing a direction at polar offset
    // alpha in (0, pi) from the kernel center. Symmetric in the pair of
    // directions because alpha is.
    double pdf_solid_angle(double alpha) const;

private:
    double sigma_;
    double cdf_lo_;   // normal_cdf(-pi/sigma)
    double mass_;     // normal_cdf(pi/sigma) - cdf_lo_
};

// Orthonormal frame around a unit axis (branchless construction).
struct Frame {
    Vec3 tangent, bitangent, normal;

    explicit Frame(const Vec3 &n);

    Vec3 to_world(const Vec3 &local) const {
        return local.x * tangent + local.y * bitangent + local.z * normal;
    }
    Vec3 to_local(const Vec3 &w) const {
        return {dot(w, tangent), dot(w, bitangent), dot(w, normal)};
    }
};

// Rotates omega by a truncated-normal polar offset and a uniform azimuth.
Vec3 perturb_direction(const Vec3 &omega, const AngularKernel &kernel, RandomSequence &rng);

// Archimedes cylindrical projection of a unit direction onto [0,1]^2:
// (azimuth / 2pi, (z + 1) / 2). Equal canonical area covers equal solid angle.
CanonicalPoint2 cylindrical_coords(const Vec3 &omega);

// Inverse of cylindrical_coords (used by tests and area checks).
Vec3 cylindrical_direction(const CanonicalPoint2 &p);

// Cosine-weighted hemisphere sample around +z, pdf = cos(theta)/pi.
Vec3 sample_cosine_hemisphere(RandomSequence &rng);

} // namespace ramlt
