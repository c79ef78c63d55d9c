// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <ostream>

namespace hypersim
{

/// Cartesian triplet in meters, or a unitless direction.
struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const { return *this / norm(); }
};

constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

/// Angle between two directions in radians, robust near 0 and pi.
inline double angle_between(const Vec3 &a, const Vec3 &b)
{
    return std::atan2(cross(a, b).norm(), dot(a, b));
}

/// Right-handed rotation of v about the unit axis k (Rodrigues).
inline Vec3 rotate(const Vec3 &v, const Vec3 &k, double angle_rad)
{
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    return v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
}

inline std::ostream &operator<<(std::ostream &os, const Vec3 &v)
{
    return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0; // m/s

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

} // namespace hypersim
