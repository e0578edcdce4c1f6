// Unit-sphere geometry: 3-vectors and RA/Dec <-> Cartesian conversion.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sky {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

constexpr double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// RA/Dec in degrees; ra in [0,360), dec in [-90,90].
struct SphericalPoint {
  double ra = 0.0;
  double dec = 0.0;

  Vec3 unit_vector() const {
    const double cra = std::cos(deg_to_rad(ra)), sra = std::sin(deg_to_rad(ra));
    const double cdec = std::cos(deg_to_rad(dec)), sdec = std::sin(deg_to_rad(dec));
    return {cdec * cra, cdec * sra, sdec};
  }

  static SphericalPoint from_vector(const Vec3& v) {
    const Vec3 u = normalized(v);
    double ra = rad_to_deg(std::atan2(u.y, u.x));
    if (ra < 0.0) ra += 360.0;
    if (ra >= 360.0) ra = 0.0;
    const double dec = rad_to_deg(std::asin(std::clamp(u.z, -1.0, 1.0)));
    return {ra, dec};
  }
};

// Angle between unit vectors, in radians, stable near 0 and pi.
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

}  // namespace sky
