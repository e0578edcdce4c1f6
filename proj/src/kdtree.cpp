#include "sky/kdtree.hpp"

#include <algorithm>
#include <cmath>

namespace sky {

namespace {

void check_dims(std::size_t expected, std::size_t got) {
  if (expected != got)
    fail(Errc::dimension_mismatch, "expected " + std::to_string(expected) + "-d point, got " + std::to_string(got));
}

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

}  // namespace

KdTree KdTree::build(std::span<const Point> points, const KdBuildParams& params) {
  if (params.leaf_point_threshold < 1 && !(params.leaf_extent_threshold > 0.0))
    fail(Errc::bad_params, "need a positive leaf threshold");
  KdTree tree;
  tree.params_ = params;
  if (points.empty()) return tree;
  tree.dims_ = points[0].size();
  if (tree.dims_ == 0) fail(Errc::bad_params, "zero-dimensional points");
  tree.points_.reserve(points.size());
  for (const auto& p : points) {
    check_dims(tree.dims_, p.size());
    tree.points_.push_back(p);
  }
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  tree.root_ = tree.build_node(std::move(idx), 0);
  return tree;
}

double KdTree::extent_longer_side(const std::vector<std::size_t>& idx) const {
  double longest = 0.0;
  for (std::size_t d = 0; d < dims_; ++d) {
    double lo = points_[idx[0]][d], hi = lo;
    for (std::size_t i : idx) {
      lo = std::min(lo, points_[i][d]);
      hi = std::max(hi, points_[i][d]);
    }
    longest = std::max(longest, hi - lo);
  }
  return longest;
}

bool KdTree::should_stop(const std::vector<std::size_t>& idx) const {
  if (params_.leaf_point_threshold >= 1 && idx.size() <= params_.leaf_point_threshold) return true;
  return extent_longer_side(idx) <= params_.leaf_extent_threshold;
}

int KdTree::pick_dimension(const std::vector<std::size_t>& idx, int depth) const {
  auto spread = [&](std::size_t d) {
    double lo = points_[idx[0]][d], hi = lo;
    for (std::size_t i : idx) {
      lo = std::min(lo, points_[i][d]);
      hi = std::max(hi, points_[i][d]);
    }
    return hi - lo;
  };
  if (params_.splitting_rule == KdSplitRule::cycle_median) {
    // Cycle by depth; skip dimensions the node is flat in (a median split
    // there would not separate anything).
    for (std::size_t probe = 0; probe < dims_; ++probe) {
      std::size_t d = (std::size_t(depth) + probe) % dims_;
      if (spread(d) > 0.0) return int(d);
    }
    return int(std::size_t(depth) % dims_);
  }
  // max_variance_median, ties to the lowest index
  int best = 0;
  double best_var = -1.0;
  for (std::size_t d = 0; d < dims_; ++d) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i : idx) {
      double v = points_[i][d];
      sum += v;
      sumsq += v * v;
    }
    double n = double(idx.size());
    double var = sumsq / n - (sum / n) * (sum / n);
    if (var > best_var) {
      best_var = var;
      best = int(d);
    }
  }
  return best;
}

std::unique_ptr<KdTree::Node> KdTree::build_node(std::vector<std::size_t> idx, int depth) {
  auto node = std::make_unique<Node>();
  node->depth = depth;
  if (should_stop(idx)) {
    node->indices = std::move(idx);
    return node;
  }
  const int d = pick_dimension(idx, depth);
  std::vector<double> vals(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = points_[idx[i]][d];
  const std::size_t mid = (vals.size() - 1) / 2;  // lower median
  std::nth_element(vals.begin(), vals.begin() + std::ptrdiff_t(mid), vals.end());
  double split = vals[mid];
  // A median equal to the max would send everything left; back off to the
  // largest value strictly below it (one exists, the dimension is not flat).
  double mx = *std::max_element(vals.begin(), vals.end());
  if (split == mx) {
    double below = -std::numeric_limits<double>::infinity();
    for (double v : vals)
      if (v < mx) below = std::max(below, v);
    split = below;
  }
  std::vector<std::size_t> left, right;
  for (std::size_t i : idx)
    (points_[i][d] <= split ? left : right).push_back(i);
  node->split_dim = d;
  node->split_value = split;
  node->left = build_node(std::move(left), depth + 1);
  node->right = build_node(std::move(right), depth + 1);
  return node;
}

void KdTree::insert(const Point& p) {
  if (!root_) {
    dims_ = p.size();
    if (dims_ == 0) fail(Errc::bad_params, "zero-dimensional point");
    points_.push_back(p);
    root_ = std::make_unique<Node>();
    root_->indices.push_back(0);
    last_insert_path_ = 1;
    return;
  }
  check_dims(dims_, p.size());
  points_.push_back(p);
  const std::size_t new_index = points_.size() - 1;
  Node* node = root_.get();
  std::size_t path = 1;
  while (!node->is_leaf()) {
    node = (p[node->split_dim] <= node->split_value) ? node->left.get() : node->right.get();
    ++path;
  }
  node->indices.push_back(new_index);
  last_insert_path_ = path;
  if (!should_stop(node->indices)) {
    // Re-split the overflowing leaf in place by the active rule.
    auto replacement = build_node(std::move(node->indices), node->depth);
    *node = std::move(*replacement);
  }
}

namespace {

void range_collect(const KdTree::Node* node, const std::vector<Point>& pts, const KdBox& box,
                   std::vector<std::size_t>& out) {
  if (node->is_leaf()) {
    for (std::size_t i : node->indices) {
      bool inside = true;
      for (std::size_t d = 0; d < box.low.size() && inside; ++d)
        inside = pts[i][d] >= box.low[d] && pts[i][d] <= box.high[d];
      if (inside) out.push_back(i);
    }
    return;
  }
  if (box.low[node->split_dim] <= node->split_value) range_collect(node->left.get(), pts, box, out);
  if (box.high[node->split_dim] > node->split_value) range_collect(node->right.get(), pts, box, out);
}

struct HeapEntry {
  double sq = 0.0;
  std::size_t index = 0;

  bool operator<(const HeapEntry& o) const { return sq < o.sq || (sq == o.sq && index < o.index); }
};

void knn_collect(const KdTree::Node* node, const std::vector<Point>& pts, const Point& q, std::size_t k,
                 std::vector<HeapEntry>& heap) {
  if (node->is_leaf()) {
    for (std::size_t i : node->indices) {
      HeapEntry e{sq_dist(pts[i], q), i};
      if (heap.size() < k) {
        heap.push_back(e);
        std::push_heap(heap.begin(), heap.end());
      } else if (e < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = e;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double delta = q[node->split_dim] - node->split_value;
  const KdTree::Node* near = delta <= 0.0 ? node->left.get() : node->right.get();
  const KdTree::Node* far = delta <= 0.0 ? node->right.get() : node->left.get();
  knn_collect(near, pts, q, k, heap);
  // The far side can still hold an equal-distance, earlier-inserted point,
  // so prune only on strict excess.
  if (heap.size() < k || delta * delta <= heap.front().sq) knn_collect(far, pts, q, k, heap);
}

}  // namespace

std::vector<std::size_t> KdTree::range_query(const KdBox& box) const {
  if (!root_) return {};
  check_dims(dims_, box.low.size());
  check_dims(dims_, box.high.size());
  for (std::size_t d = 0; d < dims_; ++d)
    if (box.low[d] > box.high[d]) fail(Errc::bad_window, "low > high in dimension " + std::to_string(d));
  std::vector<std::size_t> out;
  range_collect(root_.get(), points_, box, out);
  return out;
}

std::vector<Neighbor> KdTree::knn(const Point& query, std::size_t k) const {
  if (k < 1) fail(Errc::bad_params, "k must be at least 1");
  if (!root_ || points_.empty()) fail(Errc::empty_tree, "knn on empty tree");
  check_dims(dims_, query.size());
  std::vector<HeapEntry> heap;
  heap.reserve(std::min(k, points_.size()));
  knn_collect(root_.get(), points_, query, k, heap);
  std::sort(heap.begin(), heap.end());
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) out[i] = {heap[i].index, std::sqrt(heap[i].sq)};
  return out;
}

}  // namespace sky
