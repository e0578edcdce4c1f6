#include "sky/htm.hpp"

#include <charconv>
#include <limits>

#include "sky/error.hpp"

namespace sky {

std::string TrixelId::to_string() const { return std::to_string(level) + ":" + std::to_string(bits); }

TrixelId TrixelId::from_string(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) fail(Errc::bad_config, "trixel id '" + s + "'");
  TrixelId id;
  auto r1 = std::from_chars(s.data(), s.data() + colon, id.level);
  auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), id.bits);
  if (r1.ec != std::errc() || r2.ec != std::errc() || id.level < 0 || id.level > kMaxHtmLevel)
    fail(Errc::bad_config, "trixel id '" + s + "'");
  return id;
}

double SphericalTriangle::area() const {
  // Van Oosterom-Strackee solid angle formula.
  const double t = std::abs(triple(v0, v1, v2));
  const double d = 1.0 + dot(v0, v1) + dot(v1, v2) + dot(v2, v0);
  return 2.0 * std::atan2(t, d);
}

bool SphericalTriangle::contains(const Vec3& p) const {
  return triple(v0, v1, p) >= 0.0 && triple(v1, v2, p) >= 0.0 && triple(v2, v0, p) >= 0.0;
}

namespace {

// Strict variant used for first-hit descent: >= on the first two edges,
// > on the third.
bool contains_strict(const SphericalTriangle& t, const Vec3& p) {
  return triple(t.v0, t.v1, p) >= 0.0 && triple(t.v1, t.v2, p) >= 0.0 && triple(t.v2, t.v0, p) > 0.0;
}

// Worst min-edge margin; larger is deeper inside.
double interior_margin(const SphericalTriangle& t, const Vec3& p) {
  return std::min({triple(t.v0, t.v1, p), triple(t.v1, t.v2, p), triple(t.v2, t.v0, p)});
}

}  // namespace

std::array<SphericalTriangle, 4> SphericalTriangle::subdivide() const {
  const Vec3 w0 = normalized(v1 + v2);
  const Vec3 w1 = normalized(v0 + v2);
  const Vec3 w2 = normalized(v0 + v1);
  return {SphericalTriangle{v0, w2, w1}, SphericalTriangle{v1, w0, w2}, SphericalTriangle{v2, w1, w0},
          SphericalTriangle{w0, w1, w2}};
}

const std::array<SphericalTriangle, 8>& root_faces() {
  static const std::array<SphericalTriangle, 8> faces = [] {
    const Vec3 p0{0, 0, 1}, p1{1, 0, 0}, p2{0, 1, 0}, p3{-1, 0, 0}, p4{0, -1, 0}, p5{0, 0, -1};
    return std::array<SphericalTriangle, 8>{
        SphericalTriangle{p1, p5, p2},  // S0
        SphericalTriangle{p2, p5, p3},  // S1
        SphericalTriangle{p3, p5, p4},  // S2
        SphericalTriangle{p4, p5, p1},  // S3
        SphericalTriangle{p1, p0, p4},  // N0
        SphericalTriangle{p4, p0, p3},  // N1
        SphericalTriangle{p3, p0, p2},  // N2
        SphericalTriangle{p2, p0, p1},  // N3
    };
  }();
  return faces;
}

SphericalTriangle trixel_triangle(const TrixelId& id) {
  SphericalTriangle t = root_faces()[id.root_face()];
  for (int d = 1; d <= id.level; ++d) t = t.subdivide()[id.code_at(d)];
  return t;
}

std::vector<TrixelId> all_trixels(int level) {
  std::vector<TrixelId> out;
  out.reserve(std::size_t(8) << (2 * level));
  for (int f = 0; f < 8; ++f) {
    TrixelId id{0, std::uint64_t(f)};
    std::uint64_t first = id.bits << (2 * level);
    std::uint64_t count = std::uint64_t(1) << (2 * level);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(TrixelId{level, first + i});
  }
  return out;
}

TrixelId locate(const Vec3& point, int level) {
  if (level < 0 || level > kMaxHtmLevel)
    fail(Errc::level_too_deep, "level " + std::to_string(level) + " exceeds " + std::to_string(kMaxHtmLevel));
  const Vec3 p = normalized(point);

  auto pick = [&p](std::span<const SphericalTriangle> candidates) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (contains_strict(candidates[i], p)) return i;
    // Strict tests leave some cell-boundary arcs unclaimed; rescan closed.
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (candidates[i].contains(p)) return i;
    // Numerical fallback for points that sit on a boundary to rounding
    // error: the candidate the point is deepest inside of.
    std::size_t best = 0;
    double best_margin = interior_margin(candidates[0], p);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      double m = interior_margin(candidates[i], p);
      if (m > best_margin) {
        best_margin = m;
        best = i;
      }
    }
    return best;
  };

  const auto& faces = root_faces();
  std::size_t face = pick(std::span<const SphericalTriangle>(faces.data(), faces.size()));
  TrixelId id{0, std::uint64_t(face)};
  SphericalTriangle tri = faces[face];
  for (int d = 0; d < level; ++d) {
    const auto kids = tri.subdivide();
    std::size_t c = pick(std::span<const SphericalTriangle>(kids.data(), kids.size()));
    id = id.child(int(c));
    tri = kids[c];
  }
  return id;
}

TrixelId locate(const SphericalPoint& p, int level) { return locate(p.unit_vector(), level); }

double min_angle_to_triangle(const Vec3& q, const SphericalTriangle& t) {
  if (t.contains(q)) return 0.0;
  const Vec3 verts[3] = {t.v0, t.v1, t.v2};
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3; ++e) {
    const Vec3& a = verts[e];
    const Vec3& b = verts[(e + 1) % 3];
    const Vec3 n = normalized(cross(a, b));
    const double s = dot(q, n);
    const Vec3 proj = q - n * s;
    double d;
    if (norm(proj) > 1e-300 && dot(cross(a, normalized(proj)), n) >= 0.0 &&
        dot(cross(normalized(proj), b), n) >= 0.0) {
      d = std::abs(std::asin(std::clamp(s, -1.0, 1.0)));
    } else {
      d = std::min(angle_between(q, a), angle_between(q, b));
    }
    best = std::min(best, d);
  }
  return best;
}

namespace {

enum class CapClass { reject, partial, full };

CapClass classify_cap(const SphericalTriangle& t, const Vec3& center, double radius_rad) {
  const double d_min = min_angle_to_triangle(center, t);
  if (d_min > radius_rad) return CapClass::reject;
  // Farthest point of the triangle from the center, via the antipode:
  // max distance to c == pi - min distance to -c. This stays correct for
  // radius > 90 degrees, where the cap's complement can sit strictly
  // inside a triangle whose vertices and edges are all inside the cap.
  const double d_max = std::numbers::pi - min_angle_to_triangle(center * -1.0, t);
  if (d_max <= radius_rad) return CapClass::full;
  return CapClass::partial;
}

void emit_descendants(const TrixelId& id, int target_level, std::vector<TrixelId>& out) {
  if (id.level == target_level) {
    out.push_back(id);
    return;
  }
  const int remaining = target_level - id.level;
  const std::uint64_t first = id.bits << (2 * remaining);
  const std::uint64_t count = std::uint64_t(1) << (2 * remaining);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(TrixelId{target_level, first + i});
}

void cover_recurse(const TrixelId& id, const SphericalTriangle& tri, const Vec3& center,
                   double radius_rad, int target_level, CapCoverage& out) {
  switch (classify_cap(tri, center, radius_rad)) {
    case CapClass::reject:
      return;
    case CapClass::full:
      emit_descendants(id, target_level, out.full);
      return;
    case CapClass::partial:
      if (id.level == target_level) {
        out.partial.push_back(id);
        return;
      }
      const auto kids = tri.subdivide();
      for (int c = 0; c < 4; ++c) cover_recurse(id.child(c), kids[c], center, radius_rad, target_level, out);
  }
}

}  // namespace

CapCoverage cover_cap(const SphericalPoint& center, double radius_deg, int level) {
  if (!(radius_deg > 0.0) || radius_deg > 180.0)
    fail(Errc::bad_radius, "radius " + std::to_string(radius_deg) + " not in (0, 180]");
  if (level < 0 || level > kMaxHtmLevel) fail(Errc::level_too_deep, "level " + std::to_string(level));
  CapCoverage out;
  const Vec3 c = center.unit_vector();
  const double r = deg_to_rad(radius_deg);
  const auto& faces = root_faces();
  for (int f = 0; f < 8; ++f) cover_recurse(TrixelId{0, std::uint64_t(f)}, faces[f], c, r, level, out);
  return out;
}

HtmPartition partition(std::span<const SphericalPoint> positions, int level) {
  HtmPartition part;
  part.level = level;
  for (std::size_t i = 0; i < positions.size(); ++i)
    part.buckets[locate(positions[i], level)].push_back(i);
  return part;
}

}  // namespace sky
