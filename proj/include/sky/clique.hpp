// CLIQUE: grid-based subspace clustering — dense unit discovery over the
// subspace lattice, cluster identification by face adjacency, and minimal
// rectangular descriptions.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sky/error.hpp"
#include "sky/point.hpp"

namespace sky {

struct CliqueParams {
  int xi = 10;        // intervals per dimension
  double tau = 0.02;  // density (selectivity) threshold, strict
};

struct GridUnit {
  std::vector<int> cells;  // one interval index per subspace dimension
  std::uint64_t count = 0;

  bool operator==(const GridUnit&) const = default;
};

struct SubspaceUnits {
  std::vector<std::size_t> dims;  // ascending dimension indices
  std::vector<GridUnit> units;    // dense units, lexicographic by cells
};

// Per-dimension grid bounds: data min/max, right-closed last interval.
struct GridBounds {
  std::vector<double> lo, width;  // width = (max-min)/xi per dimension
  int xi = 0;

  int cell_of(double value, std::size_t dim) const;
  static GridBounds fit(std::span<const Point> data, int xi);
};

// Bottom-up lattice search: 1-d units by direct counting, higher subspaces
// by joining dense units that share all but one dimension, pruned by
// monotonicity, then counted. Dense means count/N > tau, strictly.
std::vector<SubspaceUnits> clique_dense_units(std::span<const Point> data, const CliqueParams& params);

// Connected components over one subspace's dense units; units are adjacent
// iff they differ by exactly one in exactly one interval index.
std::vector<std::vector<std::size_t>> clique_identify_clusters(const SubspaceUnits& subspace);

// Axis-aligned cell ranges, one [lo, hi] pair per subspace dimension.
using Region = std::vector<std::pair<int, int>>;

// Greedy cover of one cluster by maximal rectangles plus a redundancy
// sweep. The regions cover exactly the cluster's units.
std::vector<Region> clique_minimal_description(const SubspaceUnits& subspace,
                                               std::span<const std::size_t> cluster);

}  // namespace sky
