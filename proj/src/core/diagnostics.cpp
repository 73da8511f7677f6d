#include "diagnostics.hpp"

#include "image_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ramlt {

ErrorReport error_report(const Image &image, const Image &reference, double epsilon, bool rgb) {
    if (image.width != reference.width || image.height != reference.height)
        throw std::invalid_argument("error_report: image dimensions differ");
    ErrorReport report;
    report.width = image.width;
    report.height = image.height;
    report.channels = rgb ? 3 : 1;
    report.map.reserve(static_cast<size_t>(image.width) * image.height * report.channels);

    size_t pixels = static_cast<size_t>(image.width) * image.height;
    for (size_t i = 0; i < pixels; ++i) {
        const float *a = &image.data[i * 3];
        const float *b = &reference.data[i * 3];
        if (rgb) {
            for (int c = 0; c < 3; ++c)
                report.map.push_back(std::abs(a[c] - b[c]) / (b[c] + epsilon));
        } else {
            double la = luminance({a[0], a[1], a[2]});
            double lb = luminance({b[0], b[1], b[2]});
            report.map.push_back(std::abs(la - lb) / (lb + epsilon));
        }
    }
    double sum_sq = 0.0;
    for (double e : report.map)
        sum_sq += e * e;
    report.rrmse = std::sqrt(sum_sq / static_cast<double>(report.map.size()));
    return report;
}

Image error_map_image(const ErrorReport &report) {
    Image img(report.width, report.height);
    size_t pixels = static_cast<size_t>(report.width) * report.height;
    for (size_t i = 0; i < pixels; ++i) {
        double v = 0.0;
        if (report.channels == 1) {
            v = report.map[i];
        } else {
            for (int c = 0; c < report.channels; ++c)
                v += report.map[i * report.channels + c];
            v /= report.channels;
        }
        float f = static_cast<float>(v);
        img.data[i * 3 + 0] = f;
        img.data[i * 3 + 1] = f;
        img.data[i * 3 + 2] = f;
    }
    return img;
}

namespace {

// ramp stops at t = 0, 1/4, 1/2, 3/4, 1
constexpr double kRamp[5][3] = {
    {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}, {1.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};

void false_color(double t, unsigned char out[3]) {
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    int lo = std::min(static_cast<int>(t), 3);
    double w = t - lo;
    for (int c = 0; c < 3; ++c) {
        double v = kRamp[lo][c] * (1.0 - w) + kRamp[lo + 1][c] * w;
        out[c] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
}

} // namespace

void write_error_map_png(const ErrorReport &report, const std::string &path, double scale) {
    Image gray = error_map_image(report);
    size_t pixels = static_cast<size_t>(report.width) * report.height;
    std::vector<unsigned char> rgb(pixels * 3);
    for (size_t i = 0; i < pixels; ++i)
        false_color(gray.data[i * 3] / scale, &rgb[i * 3]);
    write_png_rgb8(rgb.data(), report.width, report.height, path);
}

ChainDiagnostics autocorrelation_time(std::span<const double> series) {
    size_t n = series.size();
    if (n < 1000)
        throw std::invalid_argument("autocorrelation_time: series too short");
    double mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0))
        throw std::invalid_argument("autocorrelation_time: series has no variance");

    auto rho = [&](size_t k) {
        double c = 0.0;
        for (size_t i = 0; i + k < n; ++i)
            c += (series[i] - mean) * (series[i + k] - mean);
        return c / (static_cast<double>(n) * var);
    };

    // Geyer initial positive sequence: sum pairs until one goes non-positive.
    double tau = -1.0;
    size_t max_lag = n / 2;
    for (size_t m = 0;; ++m) {
        size_t k0 = 2 * m, k1 = 2 * m + 1;
        if (k1 > max_lag)
            break;
        double gamma = rho(k0) + rho(k1);
        if (gamma <= 0.0)
            break;
        tau += 2.0 * gamma;
    }
    tau = std::max(tau, 1e-3);
    ChainDiagnostics d;
    d.tau = tau;
    d.n_eff = static_cast<double>(n) / tau;
    d.sigma2 = tau / static_cast<double>(n) * var;
    return d;
}

} // namespace ramlt
