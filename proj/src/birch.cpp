#include "sky/birch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sky {

ClusteringFeature ClusteringFeature::from_point(std::span<const double> p) {
  ClusteringFeature cf;
  cf.n = 1;
  cf.ls.assign(p.begin(), p.end());
  cf.ss = 0.0;
  for (double v : p) cf.ss += v * v;
  return cf;
}

std::vector<double> ClusteringFeature::centroid() const {
  if (n == 0) fail(Errc::bad_params, "centroid of empty clustering feature");
  std::vector<double> c(ls.size());
  for (std::size_t d = 0; d < ls.size(); ++d) c[d] = ls[d] / double(n);
  return c;
}

double ClusteringFeature::radius() const {
  if (n == 0) fail(Errc::bad_params, "radius of empty clustering feature");
  double mean_sq = 0.0;
  for (double v : ls) mean_sq += (v / double(n)) * (v / double(n));
  return std::sqrt(std::max(0.0, ss / double(n) - mean_sq));
}

ClusteringFeature cf_merge(const ClusteringFeature& a, const ClusteringFeature& b) {
  if (a.n == 0) return b;
  if (b.n == 0) return a;
  if (a.dims() != b.dims()) fail(Errc::dimension_mismatch, "clustering feature arity differs");
  ClusteringFeature m = a;
  m.n += b.n;
  for (std::size_t d = 0; d < m.ls.size(); ++d) m.ls[d] += b.ls[d];
  m.ss += b.ss;
  return m;
}

struct CfTree::Node {
  bool leaf = true;
  std::vector<ClusteringFeature> cfs;
  std::vector<std::unique_ptr<Node>> children;  // empty for leaves
};

struct CfTree::SplitResult {
  bool split = false;
  ClusteringFeature cf_a, cf_b;
  std::unique_ptr<Node> node_b;
};

CfTree::CfTree(BirchParams params) : params_(params) {
  if (params_.branching < 2) fail(Errc::bad_params, "branching factor must be at least 2");
  if (params_.threshold < 0.0) fail(Errc::bad_params, "threshold must be non-negative");
}

CfTree::~CfTree() = default;
CfTree::CfTree(CfTree&&) noexcept = default;
CfTree& CfTree::operator=(CfTree&&) noexcept = default;

double CfTree::centroid_sq_dist(const ClusteringFeature& cf, std::span<const double> p) {
  ++distance_evals_;
  double s = 0.0;
  for (std::size_t d = 0; d < cf.dims(); ++d) {
    double t = cf.ls[d] / double(cf.n) - p[d];
    s += t * t;
  }
  return s;
}

void CfTree::split_entries(std::vector<ClusteringFeature>& cfs,
                           std::vector<std::unique_ptr<Node>>& children, bool leaf, Node& out_a,
                           Node& out_b) {
  // Seeds: the farthest pair of entry centroids.
  const std::size_t n = cfs.size();
  std::size_t sa = 0, sb = 1;
  double worst = -1.0;
  std::vector<std::vector<double>> cents(n);
  for (std::size_t i = 0; i < n; ++i) cents[i] = cfs[i].centroid();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < cents[i].size(); ++d) {
        double t = cents[i][d] - cents[j][d];
        s += t * t;
      }
      if (s > worst) {
        worst = s;
        sa = i;
        sb = j;
      }
    }
  }
  out_a.leaf = out_b.leaf = leaf;
  for (std::size_t i = 0; i < n; ++i) {
    double da = 0.0, db = 0.0;
    for (std::size_t d = 0; d < cents[i].size(); ++d) {
      double ta = cents[i][d] - cents[sa][d];
      double tb = cents[i][d] - cents[sb][d];
      da += ta * ta;
      db += tb * tb;
    }
    Node& dst = (i == sa || (i != sb && da <= db)) ? out_a : out_b;
    dst.cfs.push_back(std::move(cfs[i]));
    if (!leaf) dst.children.push_back(std::move(children[i]));
  }
}

CfTree::SplitResult CfTree::insert_into(Node& node, const ClusteringFeature& point_cf,
                                        std::span<const double> point) {
  if (node.leaf) {
    // Nearest entry by centroid; absorb if the merged radius stays small.
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.cfs.size(); ++i) {
      double d = centroid_sq_dist(node.cfs[i], point);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    bool absorbed = false;
    if (!node.cfs.empty()) {
      ClusteringFeature merged = cf_merge(node.cfs[best], point_cf);
      if (merged.radius() <= params_.threshold) {
        node.cfs[best] = std::move(merged);
        absorbed = true;
      }
    }
    if (!absorbed) node.cfs.push_back(point_cf);
  } else {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.cfs.size(); ++i) {
      double d = centroid_sq_dist(node.cfs[i], point);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    SplitResult child_split = insert_into(*node.children[best], point_cf, point);
    if (child_split.split) {
      node.cfs[best] = std::move(child_split.cf_a);
      node.cfs.push_back(std::move(child_split.cf_b));
      node.children.push_back(std::move(child_split.node_b));
    } else {
      node.cfs[best] = cf_merge(node.cfs[best], point_cf);
    }
  }

  SplitResult result;
  if (node.cfs.size() > params_.branching) {
    auto node_b = std::make_unique<Node>();
    Node replacement;
    split_entries(node.cfs, node.children, node.leaf, replacement, *node_b);
    ClusteringFeature cf_a, cf_b;
    for (const auto& cf : replacement.cfs) cf_a = cf_merge(cf_a, cf);
    for (const auto& cf : node_b->cfs) cf_b = cf_merge(cf_b, cf);
    node = std::move(replacement);
    result.split = true;
    result.cf_a = std::move(cf_a);
    result.cf_b = std::move(cf_b);
    result.node_b = std::move(node_b);
  }
  return result;
}

void CfTree::insert(std::span<const double> point) {
  if (!root_) {
    dims_ = point.size();
    if (dims_ == 0) fail(Errc::bad_params, "zero-dimensional point");
    root_ = std::make_unique<Node>();
  }
  if (point.size() != dims_) fail(Errc::dimension_mismatch, "point arity differs from tree");
  ClusteringFeature point_cf = ClusteringFeature::from_point(point);
  SplitResult split = insert_into(*root_, point_cf, point);
  if (split.split) {
    auto old_root = std::move(root_);
    root_ = std::make_unique<Node>();
    root_->leaf = false;
    root_->cfs.push_back(std::move(split.cf_a));
    root_->cfs.push_back(std::move(split.cf_b));
    root_->children.push_back(std::move(old_root));
    root_->children.push_back(std::move(split.node_b));
  }
  ++inserted_;
}

std::vector<ClusteringFeature> CfTree::leaf_entries() const {
  std::vector<ClusteringFeature> out;
  if (!root_) return out;
  // Depth-first, preserving child order, so entries come out left to right.
  std::vector<std::pair<const Node*, std::size_t>> path{{root_.get(), 0}};
  while (!path.empty()) {
    const Node* node = path.back().first;
    if (node->leaf) {
      out.insert(out.end(), node->cfs.begin(), node->cfs.end());
      path.pop_back();
      continue;
    }
    const std::size_t next = path.back().second;
    if (next >= node->children.size()) {
      path.pop_back();
      continue;
    }
    ++path.back().second;
    path.emplace_back(node->children[next].get(), 0);
  }
  return out;
}

ClusteringFeature CfTree::root_cf() const {
  ClusteringFeature total;
  if (!root_) return total;
  for (const auto& cf : root_->cfs) total = cf_merge(total, cf);
  return total;
}

std::size_t CfTree::height() const {
  std::size_t h = 0;
  const Node* node = root_.get();
  while (node) {
    ++h;
    node = node->leaf ? nullptr : node->children.front().get();
  }
  return h;
}

std::vector<std::vector<std::size_t>> birch_global(std::span<const ClusteringFeature> leaf_cfs,
                                                   std::size_t k) {
  if (k < 1) fail(Errc::bad_params, "k must be at least 1");
  if (k > leaf_cfs.size())
    fail(Errc::too_few_subclusters, std::to_string(leaf_cfs.size()) + " entries for k=" + std::to_string(k));

  struct Cluster {
    ClusteringFeature cf;
    std::vector<std::size_t> members;
    bool alive = true;
  };
  std::vector<Cluster> clusters(leaf_cfs.size());
  for (std::size_t i = 0; i < leaf_cfs.size(); ++i) {
    clusters[i].cf = leaf_cfs[i];
    clusters[i].members = {i};
  }

  auto dist = [&](std::size_t a, std::size_t b) {
    const auto ca = clusters[a].cf.centroid();
    const auto cb = clusters[b].cf.centroid();
    double s = 0.0;
    for (std::size_t d = 0; d < ca.size(); ++d) {
      double t = ca[d] - cb[d];
      s += t * t;
    }
    return s;
  };

  std::size_t alive = clusters.size();
  while (alive > k) {
    std::size_t best_a = 0, best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      if (!clusters[a].alive) continue;
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        if (!clusters[b].alive) continue;
        double d = dist(a, b);
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    clusters[best_a].cf = cf_merge(clusters[best_a].cf, clusters[best_b].cf);
    clusters[best_a].members.insert(clusters[best_a].members.end(), clusters[best_b].members.begin(),
                                    clusters[best_b].members.end());
    clusters[best_b].alive = false;
    --alive;
  }

  std::vector<std::vector<std::size_t>> out;
  for (auto& c : clusters) {
    if (!c.alive) continue;
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c.members));
  }
  return out;
}

}  // namespace sky
