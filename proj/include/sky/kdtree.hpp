// Main-memory KD-tree over k-dimensional points: cycling or max-variance
// median splits, threshold-based leaves, insertion, range and kNN queries.
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "sky/error.hpp"
#include "sky/point.hpp"

namespace sky {

enum class KdSplitRule { cycle_median, max_variance_median };

struct KdBuildParams {
  std::size_t leaf_point_threshold = 8;
  double leaf_extent_threshold = 0.0;  // node's longer side
  KdSplitRule splitting_rule = KdSplitRule::cycle_median;
};

struct KdBox {
  Point low, high;
};

struct Neighbor {
  std::size_t index = 0;  // insertion index of the stored point
  double distance = 0.0;
};

class KdTree {
 public:
  // Duplicates allowed (multiset semantics). Empty input gives a valid
  // empty tree.
  static KdTree build(std::span<const Point> points, const KdBuildParams& params);

  void insert(const Point& p);

  // Stored points inside the closed box, as insertion indices.
  std::vector<std::size_t> range_query(const KdBox& box) const;

  // k nearest by Euclidean distance, ascending; ties by insertion order.
  // Returns all points when k exceeds the size.
  std::vector<Neighbor> knn(const Point& query, std::size_t k) const;

  std::size_t size() const { return points_.size(); }
  std::size_t dimensions() const { return dims_; }
  const Point& point(std::size_t insertion_index) const { return points_[insertion_index]; }

  struct Node {
    // internal
    int split_dim = -1;
    double split_value = 0.0;
    std::unique_ptr<Node> left, right;
    // leaf
    std::vector<std::size_t> indices;
    int depth = 0;

    bool is_leaf() const { return !left; }
  };

  const Node* root() const { return root_.get(); }
  const KdBuildParams& params() const { return params_; }

  // Statistics over the last insert() call: nodes visited root to leaf.
  std::size_t last_insert_path_length() const { return last_insert_path_; }

 private:
  KdTree() = default;

  std::unique_ptr<Node> build_node(std::vector<std::size_t> idx, int depth);
  bool should_stop(const std::vector<std::size_t>& idx) const;
  int pick_dimension(const std::vector<std::size_t>& idx, int depth) const;
  double extent_longer_side(const std::vector<std::size_t>& idx) const;

  std::vector<Point> points_;
  KdBuildParams params_;
  std::size_t dims_ = 0;
  std::unique_ptr<Node> root_;
  std::size_t last_insert_path_ = 0;
};

}  // namespace sky
