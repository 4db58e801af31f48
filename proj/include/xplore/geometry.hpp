#pragma once

#include <cmath>
#include <numbers>

namespace xplore {

// World frame: x grows east, z grows south, y is height. The ground plane
// is (x, z). Yaw angles are measured from +x toward +z, in degrees.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
    Vec2 operator*(double s) const { return {x * s, z * s}; }
    double norm() const { return std::hypot(x, z); }
};

inline Vec2 ground(const Vec3& p) { return {p.x, p.z}; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wrap an angle in degrees into (-180, 180].
inline double wrap_degrees(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

inline Vec2 yaw_vector(double yaw_deg) {
    const double r = deg_to_rad(yaw_deg);
    return {std::cos(r), std::sin(r)};
}

inline double yaw_of(const Vec2& v) { return rad_to_deg(std::atan2(v.z, v.x)); }

}  // namespace xplore
