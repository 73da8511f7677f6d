#include "image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ramlt {

void write_pfm(const Image &image, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
    for (int y = image.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char *>(image.pixel(0, y)),
                  static_cast<std::streamsize>(image.width) * 3 * sizeof(float));
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

Image read_pfm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::string magic;
    in >> magic;
    if (magic != "PF")
        throw std::runtime_error("'" + path + "' is not a color PFM file");
    int w = 0, h = 0;
    double scale = 0.0;
    in >> w >> h >> scale;
    if (!in || w <= 0 || h <= 0 || scale == 0.0)
        throw std::runtime_error("'" + path + "': malformed PFM header");
    in.get();  // single whitespace after the scale
    Image img(w, h);
    std::vector<float> row(static_cast<size_t>(w) * 3);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char *>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in)
            throw std::runtime_error("'" + path + "': truncated PFM data");
        if (scale > 0.0)  // big-endian file
            for (float &f : row) {
                char *b = reinterpret_cast<char *>(&f);
                std::swap(b[0], b[3]);
                std::swap(b[1], b[2]);
            }
        std::memcpy(img.pixel(0, y), row.data(), row.size() * sizeof(float));
    }
    return img;
}

namespace {

void put_u32(std::vector<unsigned char> &out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char> &out, const char type[4],
               const std::vector<unsigned char> &payload) {
    put_u32(out, static_cast<uint32_t>(payload.size()));
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uint32_t crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, crc);
}

} // namespace

void write_png_rgb8(const unsigned char *rgb, int width, int height, const std::string &path) {
    // scanlines with filter byte 0
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<size_t>(height) * (1 + static_cast<size_t>(width) * 3));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), rgb + static_cast<size_t>(y) * width * 3,
                   rgb + static_cast<size_t>(y + 1) * width * 3);
    }
    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(comp_size);
    if (compress2(compressed.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK)
        throw std::runtime_error("zlib compression failed");
    compressed.resize(comp_size);

    std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<unsigned char> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(width));
    put_u32(ihdr, static_cast<uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", compressed);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char *>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

void write_png(const Image &image, const std::string &path, double exposure) {
    double gain = std::pow(2.0, exposure);
    std::vector<unsigned char> rgb(static_cast<size_t>(image.width) * image.height * 3);
    for (size_t i = 0; i < rgb.size(); ++i) {
        double v = std::max(0.0, static_cast<double>(image.data[i]) * gain);
        v = std::pow(v, 1.0 / 2.2);
        rgb[i] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    write_png_rgb8(rgb.data(), image.width, image.height, path);
}

} // namespace ramlt
