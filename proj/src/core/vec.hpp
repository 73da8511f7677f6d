#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>

namespace ramlt {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    explicit constexpr Vec3(double s) : x(s), y(s), z(s) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(const Vec3 &o) const { return {x * o.x, y * o.y, z * o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }

    Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 &operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    Vec3 &operator*=(const Vec3 &o) { x *= o.x; y *= o.y; z *= o.z; return *this; }

    constexpr bool operator==(const Vec3 &o) const { return x == o.x && y == o.y && z == o.z; }

    constexpr double max_component() const { return x > y ? (x > z ? x : z) : (y > z ? y : z); }
    constexpr bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

inline constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3 &v) { return std::sqrt(dot(v, v)); }
inline constexpr double length_squared(const Vec3 &v) { return dot(v, v); }

inline Vec3 normalize(const Vec3 &v) { return v / length(v); }

inline Vec3 reflect(const Vec3 &w, const Vec3 &n) { return 2.0 * dot(w, n) * n - w; }

// Rec.709 linear luminance.
inline constexpr double luminance(const Vec3 &c) {
    return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z;
}

inline std::ostream &operator<<(std::ostream &os, const Vec3 &v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

struct Vec2 {
    double x = 0.0, y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2 &o) const { return x == o.x && y == o.y; }
};

inline std::ostream &operator<<(std::ostream &os, const Vec2 &v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

} // namespace ramlt
