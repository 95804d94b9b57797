#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rgas {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

// Positions live on the unit 3-torus [0,1)^3.
inline double wrap01(double x) {
    double w = x - std::floor(x);
    return w < 1.0 ? w : 0.0;  // floor(x) can round so that x - floor(x) == 1.0
}

inline Vec3 wrap01(const Vec3& v) { return {wrap01(v.x), wrap01(v.y), wrap01(v.z)}; }

// Minimum-image displacement component in [-0.5, 0.5); ties at +0.5 map to -0.5.
inline double min_image(double d) {
    return d - std::floor(d + 0.5);
}

inline Vec3 min_image(const Vec3& d) { return {min_image(d.x), min_image(d.y), min_image(d.z)}; }

// Torus distance between two points in [0,1)^3.
inline double torus_dist(const Vec3& a, const Vec3& b) { return norm(min_image(a - b)); }

}  // namespace rgas
