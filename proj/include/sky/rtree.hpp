// Disk-paged R-tree: one node per fixed-size page, point/range/kNN queries,
// spatial join for cross-identification, Guttman dynamic insertion as the
// baseline against bulk loading, and a structural audit.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sky/mbb.hpp"
#include "sky/page_io.hpp"

namespace sky {

struct RTreeEntry {
  Mbb box;
  std::uint64_t id = 0;  // child page for internal nodes, record id for leaves
};

struct RTreeNode {
  bool is_leaf = true;
  std::vector<RTreeEntry> entries;
};

struct RTreeOptions {
  std::uint32_t page_size = 4096;
  std::size_t cache_pages = 64;
  // 0 = as many entries as fit one page; smaller values waste page space
  // but are useful for forcing splits in tests.
  std::uint16_t max_entries = 0;
  // Records per leaf page; 0 = same as max_entries. Bulk loading fills
  // leaves to this bound.
  std::uint16_t leaf_capacity = 0;
};

// Entries a node page can hold: (page_size - node header) / entry bytes.
std::uint16_t rtree_page_fanout(std::uint32_t page_size, std::uint16_t k);

struct RTreeAuditReport {
  std::uint64_t pages = 0;
  std::uint64_t leaves = 0;
  std::uint64_t records = 0;
  std::uint16_t height = 0;
  std::uint64_t underfull_leaves = 0;
};

class RTree {
 public:
  // Creates an empty tree file (header page only).
  static RTree create(const std::string& path, std::uint16_t k, const RTreeOptions& options = {});
  static RTree open(const std::string& path, std::size_t cache_pages = 64);

  std::uint16_t k() const { return k_; }
  std::uint16_t max_entries() const { return max_entries_; }
  std::uint16_t min_entries() const { return min_entries_; }
  std::uint16_t leaf_capacity() const { return leaf_capacity_; }
  std::uint16_t min_leaf_entries() const { return std::uint16_t((std::size_t(leaf_capacity_) * 2 + 4) / 5); }
  std::uint16_t height() const { return height_; }
  std::uint64_t record_count() const { return record_count_; }
  std::uint64_t page_count() const;
  bool empty() const { return height_ == 0; }

  // Guttman insertion: least-enlargement descent, quadratic split.
  void insert(const Mbb& box, std::uint64_t record_id);

  std::vector<std::uint64_t> point_query(std::span<const double> p);
  std::vector<std::uint64_t> range_query(const Mbb& window);
  // k nearest stored entries by box min-distance, ascending; best-first.
  std::vector<std::pair<std::uint64_t, double>> knn(std::span<const double> q, std::size_t k_neighbors);

  // Pairs (idA, idB) whose boxes lie within epsilon, by synchronized
  // descent over both trees.
  static std::vector<std::pair<std::uint64_t, std::uint64_t>> spatial_join(RTree& a, RTree& b,
                                                                           double epsilon);

  // Verifies MBB exactness, balance, occupancy and the record count;
  // throws on the first violation. Bulk-loaded trees may legitimately
  // carry one underfull leaf (the tail bucket).
  RTreeAuditReport audit(bool allow_one_underfull_leaf = false);

  void flush();
  // Drops cached pages so the next operation starts cold (for I/O
  // measurements).
  void drop_cache();
  const IoCounter& io() const { return cache_->io(); }
  void reset_io() { cache_->reset_io(); }

  // Low-level access for the bulk loader: appends a node page and returns
  // its id; finalize() writes the header.
  std::uint64_t append_node(const RTreeNode& node);
  void finalize(std::uint64_t root, std::uint16_t height, std::uint64_t count);
  RTreeNode read_node(std::uint64_t page_id);

 private:
  RTree() = default;

  void write_node(std::uint64_t page_id, const RTreeNode& node);
  std::uint64_t allocate_page();
  void write_header();
  Mbb node_box(const RTreeNode& node) const;

  // insertion helpers
  struct PathStep {
    std::uint64_t page_id;
    std::size_t entry_index;  // index in the parent, undefined for the root
  };
  std::pair<RTreeNode, RTreeNode> split_node(RTreeNode& node, std::uint16_t min_fill);

  std::unique_ptr<PageFile> file_;
  std::unique_ptr<PageCache> cache_;
  std::uint32_t page_size_ = 4096;
  std::uint16_t k_ = 0;
  std::uint16_t max_entries_ = 0;
  std::uint16_t min_entries_ = 0;
  std::uint16_t leaf_capacity_ = 0;
  std::uint64_t root_ = 0;
  std::uint16_t height_ = 0;  // 0 = empty, 1 = root is a leaf
  std::uint64_t record_count_ = 0;
  std::uint64_t next_page_ = 1;
};

}  // namespace sky
