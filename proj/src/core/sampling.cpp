#include "sampling.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ramlt {

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation to the normal quantile, ~1e-9 accurate.
double quantile_estimate(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double normal_quantile(double p) {
    assert(p > 0.0 && p < 1.0);
    double x = quantile_estimate(p);
    // One Halley refinement step against erfc brings the estimate to
    // machine precision.
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(kTwoPi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

AngularKernel::AngularKernel(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("AngularKernel: sigma must be positive");
    double t = kPi / sigma_;
    cdf_lo_ = normal_cdf(-t);
    mass_ = normal_cdf(t) - cdf_lo_;
}

double AngularKernel::sample(RandomSequence &rng) const {
    double u = rng.next_double();
    double p = cdf_lo_ + u * mass_;
    if (p <= 0.0)
        return -kPi;
    if (p >= 1.0)
        return kPi;
    double theta = sigma_ * normal_quantile(p);
    return std::clamp(theta, -kPi, kPi);
}

double AngularKernel::pdf(double theta) const {
    if (std::abs(theta) > kPi)
        return 0.0;
    return normal_pdf(theta / sigma_) / (sigma_ * mass_);
}

double AngularKernel::pdf_solid_angle(double alpha) const {
    // Offsets +alpha and -alpha fold onto the same polar angle; azimuth
    // is uniform over 2*pi.
    double s = std::max(std::sin(alpha), 1e-300);
    return pdf(alpha) / (kPi * s);
}

Frame::Frame(const Vec3 &n) : normal(n) {
    // Duff et al., branchless orthonormal basis.
    double sign = std::copysign(1.0, n.z);
    double a = -1.0 / (sign + n.z);
    double b = n.x * n.y * a;
    tangent = Vec3(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x);
    bitangent = Vec3(b, sign + n.y * n.y * a, -n.y);
}

Vec3 perturb_direction(const Vec3 &omega, const AngularKernel &kernel, RandomSequence &rng) {
    double theta = kernel.sample(rng);
    double phi = kTwoPi * rng.next_double();
    Frame frame(omega);
    double st = std::sin(theta);
    Vec3 local(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
    return normalize(frame.to_world(local));
}

CanonicalPoint2 cylindrical_coords(const Vec3 &omega) {
    double phi = std::atan2(omega.y, omega.x);
    if (phi < 0.0)
        phi += kTwoPi;
    double u = phi / kTwoPi;
    if (u >= 1.0)
        u = 0.0;
    double v = std::clamp(0.5 * (omega.z + 1.0), 0.0, 1.0);
    return {u, v};
}

Vec3 cylindrical_direction(const CanonicalPoint2 &p) {
    double phi = kTwoPi * p.u;
    double z = 2.0 * p.v - 1.0;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec3 sample_cosine_hemisphere(RandomSequence &rng) {
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    double r = std::sqrt(u1);
    double phi = kTwoPi * u2;
    return {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
}

} // namespace ramlt
