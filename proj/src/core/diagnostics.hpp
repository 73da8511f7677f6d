#pragma once

#include "film.hpp"

#include <span>
#include <string>
#include <vector>

namespace ramlt {

inline constexpr double kDefaultRrmseEpsilon = 1e-2;

// Relative error against a reference. The map stores |I-R|/(R+eps) per pixel
// (luminance mode, default) or per channel (RGB mode); rrmse is exactly the
// root mean square of the map.
struct ErrorReport {
    double rrmse = 0.0;
    int width = 0, height = 0;
    int channels = 1;
    std::vector<double> map;
};

ErrorReport error_report(const Image &image, const Image &reference,
                         double epsilon = kDefaultRrmseEpsilon, bool rgb = false);

// Error map as a grayscale HDR image (value replicated to RGB).
Image error_map_image(const ErrorReport &report);

// Fixed false-color ramp (black, blue, cyan, yellow, red over [0, scale]).
void write_error_map_png(const ErrorReport &report, const std::string &path, double scale = 1.0);

struct ChainDiagnostics {
    double tau = 1.0;
    double n_eff = 0.0;
    double sigma2 = 0.0;  // asymptotic variance estimate (tau / N) * var
};

// Truncated-sum autocorrelation-time estimator with Geyer's initial positive
// sequence window. Throws std::invalid_argument on series shorter than 1000
// or with no variance.
ChainDiagnostics autocorrelation_time(std::span<const double> series);

} // namespace ramlt
