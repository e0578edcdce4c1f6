// k-dimensional minimum bounding boxes and the distance algebra used by the
// R-tree and the spatial join.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sky/error.hpp"

namespace sky {

struct Mbb {
  std::vector<double> low, high;

  Mbb() = default;
  Mbb(std::vector<double> lo, std::vector<double> hi) : low(std::move(lo)), high(std::move(hi)) {
    if (low.size() != high.size()) fail(Errc::dimension_mismatch, "low/high arity differs");
    for (std::size_t d = 0; d < low.size(); ++d)
      if (low[d] > high[d]) fail(Errc::bad_window, "low > high in dimension " + std::to_string(d));
  }

  static Mbb point(std::span<const double> p) {
    std::vector<double> v(p.begin(), p.end());
    return Mbb(v, v);
  }

  std::size_t dims() const { return low.size(); }

  double volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < dims(); ++d) v *= high[d] - low[d];
    return v;
  }

  bool operator==(const Mbb&) const = default;
};

inline void check_same_dims(std::size_t a, std::size_t b) {
  if (a != b) fail(Errc::dimension_mismatch, std::to_string(a) + " vs " + std::to_string(b));
}

inline Mbb mbb_union(const Mbb& a, const Mbb& b) {
  check_same_dims(a.dims(), b.dims());
  Mbb u = a;
  for (std::size_t d = 0; d < a.dims(); ++d) {
    u.low[d] = std::min(u.low[d], b.low[d]);
    u.high[d] = std::max(u.high[d], b.high[d]);
  }
  return u;
}

// Closed-interval overlap: boxes sharing only a face still intersect.
inline bool mbb_intersects(const Mbb& a, const Mbb& b) {
  check_same_dims(a.dims(), b.dims());
  for (std::size_t d = 0; d < a.dims(); ++d)
    if (a.high[d] < b.low[d] || b.high[d] < a.low[d]) return false;
  return true;
}

inline bool mbb_contains_point(const Mbb& a, std::span<const double> p) {
  check_same_dims(a.dims(), p.size());
  for (std::size_t d = 0; d < a.dims(); ++d)
    if (p[d] < a.low[d] || p[d] > a.high[d]) return false;
  return true;
}

// Euclidean distance from p to the nearest point of the box; 0 inside.
inline double min_dist(const Mbb& a, std::span<const double> p) {
  check_same_dims(a.dims(), p.size());
  double s = 0.0;
  for (std::size_t d = 0; d < a.dims(); ++d) {
    double gap = std::max({a.low[d] - p[d], p[d] - a.high[d], 0.0});
    s += gap * gap;
  }
  return std::sqrt(s);
}

// Minimum distance between two boxes; 0 when they intersect.
inline double mbb_gap(const Mbb& a, const Mbb& b) {
  check_same_dims(a.dims(), b.dims());
  double s = 0.0;
  for (std::size_t d = 0; d < a.dims(); ++d) {
    double gap = std::max({a.low[d] - b.high[d], b.low[d] - a.high[d], 0.0});
    s += gap * gap;
  }
  return std::sqrt(s);
}

}  // namespace sky
