// Hierarchical Triangular Mesh: recursive 4-way subdivision of a spherical
// octahedron into trixels, point location, cap coverage and catalog
// partitioning.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sky/geom.hpp"

namespace sky {

inline constexpr int kMaxHtmLevel = 20;  // 3 + 2*20 = 43 id bits

// Packed trixel identifier: 3 root-face bits followed by 2 bits per level.
struct TrixelId {
  int level = 0;
  std::uint64_t bits = 0;

  int root_face() const { return int(bits >> (2 * level)); }
  // Child code at depth d, 1-based from the root subdivision.
  int code_at(int d) const { return int((bits >> (2 * (level - d))) & 3u); }

  TrixelId child(int code) const { return {level + 1, (bits << 2) | std::uint64_t(code)}; }
  TrixelId parent() const { return {level - 1, bits >> 2}; }

  // Serialized as "<level>:<decimal bits>".
  std::string to_string() const;
  static TrixelId from_string(const std::string& s);

  auto operator<=>(const TrixelId&) const = default;
};

struct SphericalTriangle {
  Vec3 v0, v1, v2;  // unit vectors, counterclockwise from outside

  // Spherical excess (solid angle), in steradians.
  double area() const;
  // Closed point-in-triangle test: all three edge half-spaces with >= 0.
  bool contains(const Vec3& p) const;
  // Subdivision by normalized edge midpoints; children in code order
  // (corner triangles by parent vertex index, then the center triangle).
  std::array<SphericalTriangle, 4> subdivide() const;
};

// The spherical octahedron: 8 equal triangles with vertices on the axes.
const std::array<SphericalTriangle, 8>& root_faces();

// Triangle of an arbitrary trixel, by descending its child codes.
SphericalTriangle trixel_triangle(const TrixelId& id);

// All trixel ids at `level`, in id order.
std::vector<TrixelId> all_trixels(int level);

// Locates the level-`level` trixel containing p. Boundary ties resolve
// deterministically: children are scanned in code order with strict
// containment (>= 0, >= 0, > 0 edge tests) and the first hit wins; points
// that fall through every strict test (possible only on cell boundaries)
// rescan with the closed test.
TrixelId locate(const Vec3& p, int level);
TrixelId locate(const SphericalPoint& p, int level);

struct CapCoverage {
  std::vector<TrixelId> full;     // entirely inside the cap
  std::vector<TrixelId> partial;  // intersecting the cap boundary
};

// Level-`level` trixels intersecting the spherical cap of angular radius
// `radius_deg` around `center`. Every intersecting trixel lands in exactly
// one list; disjoint trixels are absent.
CapCoverage cover_cap(const SphericalPoint& center, double radius_deg, int level);

struct HtmPartition {
  int level = 5;
  std::map<TrixelId, std::vector<std::size_t>> buckets;
};

HtmPartition partition(std::span<const SphericalPoint> positions, int level = 5);

// Minimum angular distance (radians) from q to the closed triangle; 0 inside.
double min_angle_to_triangle(const Vec3& q, const SphericalTriangle& t);

}  // namespace sky
