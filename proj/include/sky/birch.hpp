// BIRCH: clustering-feature compression in a CF-tree, then an agglomerative
// global phase over the leaf entries.
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sky/error.hpp"
#include "sky/point.hpp"

namespace sky {

// The (n, linear sum, square sum) triplet. Additive under merge; centroid
// and radius fall straight out of the sums.
struct ClusteringFeature {
  std::uint64_t n = 0;
  std::vector<double> ls;
  double ss = 0.0;

  static ClusteringFeature from_point(std::span<const double> p);

  std::size_t dims() const { return ls.size(); }
  std::vector<double> centroid() const;
  double radius() const;  // RMS distance of members to the centroid
};

ClusteringFeature cf_merge(const ClusteringFeature& a, const ClusteringFeature& b);

struct BirchParams {
  std::size_t branching = 50;  // B: max entries per node
  double threshold = 0.5;      // T: leaf entry absorption radius
};

class CfTree {
 public:
  explicit CfTree(BirchParams params);
  ~CfTree();
  CfTree(CfTree&&) noexcept;
  CfTree& operator=(CfTree&&) noexcept;

  // One pass per point: descend to the nearest leaf entry, absorb if the
  // merged radius stays within the threshold, otherwise start a new entry;
  // overflowing nodes split on their farthest entry pair.
  void insert(std::span<const double> point);

  std::vector<ClusteringFeature> leaf_entries() const;
  ClusteringFeature root_cf() const;
  std::size_t height() const;
  std::uint64_t points_inserted() const { return inserted_; }
  std::uint64_t distance_evaluations() const { return distance_evals_; }
  const BirchParams& params() const { return params_; }

 private:
  struct Node;
  struct SplitResult;

  SplitResult insert_into(Node& node, const ClusteringFeature& point_cf,
                          std::span<const double> point);
  static void split_entries(std::vector<ClusteringFeature>& cfs,
                            std::vector<std::unique_ptr<Node>>& children, bool leaf, Node& out_a,
                            Node& out_b);
  double centroid_sq_dist(const ClusteringFeature& cf, std::span<const double> p);

  BirchParams params_;
  std::unique_ptr<Node> root_;
  std::size_t dims_ = 0;
  std::uint64_t inserted_ = 0;
  std::uint64_t distance_evals_ = 0;
};

// Agglomerative merging of leaf CFs by centroid distance until k clusters
// remain; returns entry indices per cluster.
std::vector<std::vector<std::size_t>> birch_global(std::span<const ClusteringFeature> leaf_cfs,
                                                   std::size_t k);

}  // namespace sky
