// CURE: agglomerative clustering on a sample, each cluster represented by
// well-scattered points shrunk toward the centroid.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sky/error.hpp"
#include "sky/point.hpp"
#include "sky/random.hpp"

namespace sky {

struct CureParams {
  std::size_t k = 2;               // clusters to return
  std::size_t representatives = 10;  // c
  double alpha = 0.3;              // shrink factor toward the centroid
};

struct CureCluster {
  std::vector<std::size_t> members;      // indices into the sample
  std::vector<Point> representatives;    // shrunk scattered points
  Point centroid;
};

// Uniform without-replacement sample of `size` indices, deterministic per
// seed (reservoir algorithm R).
std::vector<std::size_t> draw_sample(std::size_t population, std::size_t size, std::uint64_t seed);

// Merges the two clusters with the closest representative pair until k
// remain. Distances are between shrunk representatives; ties resolve to the
// lowest cluster indices.
std::vector<CureCluster> cure_cluster(std::span<const Point> sample, const CureParams& params);

// Final assignment pass: every point labeled by the cluster owning its
// nearest representative.
std::vector<int> cure_label(std::span<const Point> points, std::span<const CureCluster> clusters);

}  // namespace sky
