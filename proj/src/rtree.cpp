#include "sky/rtree.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <queue>

#include "sky/bytes.hpp"

namespace sky {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'Y', 'R'};
constexpr std::uint16_t kVersion = 1;
// Header page: magic, version u16, k u16, M u16, m u16, root u64,
// height u16, count u64, then page_size u32 and leaf capacity u16.
constexpr std::size_t kHeaderBytes = 36;
constexpr std::size_t kNodeHeaderBytes = 8;  // is_leaf u16, reserved u16, count u32

std::size_t entry_bytes(std::uint16_t k) { return std::size_t(16) * k + 8; }

}  // namespace

std::uint16_t rtree_page_fanout(std::uint32_t page_size, std::uint16_t k) {
  const std::size_t cap = (page_size - kNodeHeaderBytes) / entry_bytes(k);
  if (cap < 2) fail(Errc::bad_params, "page size fits fewer than 2 entries");
  return std::uint16_t(std::min<std::size_t>(cap, 65535));
}

RTree RTree::create(const std::string& path, std::uint16_t k, const RTreeOptions& options) {
  if (k < 1) fail(Errc::bad_params, "k must be at least 1");
  RTree t;
  t.page_size_ = options.page_size;
  t.k_ = k;
  const std::uint16_t fit = rtree_page_fanout(options.page_size, k);
  t.max_entries_ = options.max_entries == 0 ? fit : options.max_entries;
  if (t.max_entries_ < 2 || t.max_entries_ > fit)
    fail(Errc::bad_params, "max_entries must be in [2, " + std::to_string(fit) + "]");
  t.min_entries_ = std::uint16_t((std::size_t(t.max_entries_) * 2 + 4) / 5);  // ceil(0.4 M)
  t.leaf_capacity_ = options.leaf_capacity == 0 ? t.max_entries_ : options.leaf_capacity;
  if (t.leaf_capacity_ < 2 || t.leaf_capacity_ > t.max_entries_)
    fail(Errc::bad_params, "leaf_capacity must be in [2, max_entries]");
  t.file_ = std::make_unique<PageFile>(path, options.page_size, /*truncate=*/true);
  t.cache_ = std::make_unique<PageCache>(*t.file_, options.cache_pages);
  t.write_header();
  return t;
}

RTree RTree::open(const std::string& path, std::size_t cache_pages) {
  RTree t;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::vector<std::byte> head(kHeaderBytes);
  in.read(reinterpret_cast<char*>(head.data()), kHeaderBytes);
  if (!in || std::memcmp(head.data(), kMagic, 4) != 0)
    fail(Errc::corrupt_header, "bad magic in '" + path + "'");
  if (get_u16(head, 4) != kVersion) fail(Errc::corrupt_header, "unsupported version");
  t.k_ = get_u16(head, 6);
  t.max_entries_ = get_u16(head, 8);
  t.min_entries_ = get_u16(head, 10);
  t.root_ = get_u64(head, 12);
  t.height_ = get_u16(head, 20);
  t.record_count_ = get_u64(head, 22);
  t.page_size_ = get_u32(head, 30);
  t.leaf_capacity_ = get_u16(head, 34);
  in.close();
  if (t.k_ < 1 || t.page_size_ < kNodeHeaderBytes + entry_bytes(t.k_) * t.max_entries_)
    fail(Errc::corrupt_header, "inconsistent header");
  t.file_ = std::make_unique<PageFile>(path, t.page_size_, /*truncate=*/false);
  t.cache_ = std::make_unique<PageCache>(*t.file_, cache_pages);
  t.next_page_ = std::max<std::uint64_t>(t.file_->page_count(), 1);
  return t;
}

void RTree::write_header() {
  std::vector<std::byte> page(page_size_, std::byte(0));
  std::memcpy(page.data(), kMagic, 4);
  put_u16(page, 4, kVersion);
  put_u16(page, 6, k_);
  put_u16(page, 8, max_entries_);
  put_u16(page, 10, min_entries_);
  put_u64(page, 12, root_);
  put_u16(page, 20, height_);
  put_u64(page, 22, record_count_);
  put_u32(page, 30, page_size_);
  put_u16(page, 34, leaf_capacity_);
  cache_->write(0, page);
}

std::uint64_t RTree::page_count() const { return next_page_; }

std::uint64_t RTree::allocate_page() { return next_page_++; }

void RTree::write_node(std::uint64_t page_id, const RTreeNode& node) {
  if (node.entries.size() > max_entries_) fail(Errc::bad_params, "node overflow");
  std::vector<std::byte> page(page_size_, std::byte(0));
  put_u16(page, 0, node.is_leaf ? 1 : 0);
  put_u32(page, 4, std::uint32_t(node.entries.size()));
  std::size_t off = kNodeHeaderBytes;
  for (const RTreeEntry& e : node.entries) {
    check_same_dims(e.box.dims(), k_);
    for (std::uint16_t d = 0; d < k_; ++d) put_f64(page, off + 8 * d, e.box.low[d]);
    for (std::uint16_t d = 0; d < k_; ++d) put_f64(page, off + 8 * (k_ + d), e.box.high[d]);
    put_u64(page, off + 16 * k_, e.id);
    off += entry_bytes(k_);
  }
  cache_->write(page_id, page);
}

RTreeNode RTree::read_node(std::uint64_t page_id) {
  std::vector<std::byte> page(page_size_);
  cache_->read(page_id, page);
  RTreeNode node;
  node.is_leaf = get_u16(page, 0) != 0;
  const std::uint32_t n = get_u32(page, 4);
  if (n > max_entries_) fail(Errc::corrupt_header, "node entry count overflows page");
  node.entries.reserve(n);
  std::size_t off = kNodeHeaderBytes;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<double> lo(k_), hi(k_);
    for (std::uint16_t d = 0; d < k_; ++d) lo[d] = get_f64(page, off + 8 * d);
    for (std::uint16_t d = 0; d < k_; ++d) hi[d] = get_f64(page, off + 8 * (k_ + d));
    node.entries.push_back(RTreeEntry{Mbb(std::move(lo), std::move(hi)), get_u64(page, off + 16 * k_)});
    off += entry_bytes(k_);
  }
  return node;
}

std::uint64_t RTree::append_node(const RTreeNode& node) {
  const std::uint64_t id = allocate_page();
  write_node(id, node);
  return id;
}

void RTree::finalize(std::uint64_t root, std::uint16_t height, std::uint64_t count) {
  root_ = root;
  height_ = height;
  record_count_ = count;
  write_header();
  cache_->flush();
}

void RTree::flush() {
  write_header();
  cache_->flush();
}

void RTree::drop_cache() {
  write_header();
  cache_->drop();
}

Mbb RTree::node_box(const RTreeNode& node) const {
  Mbb box = node.entries.front().box;
  for (std::size_t i = 1; i < node.entries.size(); ++i) box = mbb_union(box, node.entries[i].box);
  return box;
}

// ---- dynamic insertion (Guttman baseline) ----

namespace {

double enlargement(const Mbb& box, const Mbb& add) {
  return mbb_union(box, add).volume() - box.volume();
}

}  // namespace

std::pair<RTreeNode, RTreeNode> RTree::split_node(RTreeNode& node, std::uint16_t min_fill) {
  // Quadratic split: seeds are the pair wasting the most area together.
  auto& entries = node.entries;
  const std::size_t n = entries.size();
  std::size_t seed_a = 0, seed_b = 1;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double waste = mbb_union(entries[i].box, entries[j].box).volume() - entries[i].box.volume() -
                     entries[j].box.volume();
      if (waste > worst) {
        worst = waste;
        seed_a = i;
        seed_b = j;
      }
    }
  }
  RTreeNode a{node.is_leaf, {entries[seed_a]}};
  RTreeNode b{node.is_leaf, {entries[seed_b]}};
  Mbb box_a = entries[seed_a].box, box_b = entries[seed_b].box;
  std::vector<RTreeEntry> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (i != seed_a && i != seed_b) rest.push_back(std::move(entries[i]));

  while (!rest.empty()) {
    // Force-assign when one side must absorb everything left to reach m.
    if (a.entries.size() + rest.size() == min_fill) {
      for (auto& e : rest) {
        box_a = mbb_union(box_a, e.box);
        a.entries.push_back(std::move(e));
      }
      break;
    }
    if (b.entries.size() + rest.size() == min_fill) {
      for (auto& e : rest) {
        box_b = mbb_union(box_b, e.box);
        b.entries.push_back(std::move(e));
      }
      break;
    }
    // Pick the entry with the strongest preference.
    std::size_t pick = 0;
    double best_diff = -1.0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      double da = enlargement(box_a, rest[i].box);
      double db = enlargement(box_b, rest[i].box);
      double diff = std::abs(da - db);
      if (diff > best_diff) {
        best_diff = diff;
        pick = i;
      }
    }
    double da = enlargement(box_a, rest[pick].box);
    double db = enlargement(box_b, rest[pick].box);
    bool to_a;
    if (da != db) {
      to_a = da < db;
    } else if (box_a.volume() != box_b.volume()) {
      to_a = box_a.volume() < box_b.volume();
    } else {
      to_a = a.entries.size() <= b.entries.size();
    }
    if (to_a) {
      box_a = mbb_union(box_a, rest[pick].box);
      a.entries.push_back(std::move(rest[pick]));
    } else {
      box_b = mbb_union(box_b, rest[pick].box);
      b.entries.push_back(std::move(rest[pick]));
    }
    rest.erase(rest.begin() + std::ptrdiff_t(pick));
  }
  return {std::move(a), std::move(b)};
}

void RTree::insert(const Mbb& box, std::uint64_t record_id) {
  check_same_dims(box.dims(), k_);
  if (height_ == 0) {
    RTreeNode leaf{true, {RTreeEntry{box, record_id}}};
    root_ = append_node(leaf);
    height_ = 1;
    record_count_ = 1;
    write_header();
    return;
  }

  // Descend by least enlargement, remembering the path.
  std::vector<PathStep> path;  // path[0] = root
  std::uint64_t page = root_;
  path.push_back({page, 0});
  RTreeNode node = read_node(page);
  while (!node.is_leaf) {
    std::size_t best = 0;
    double best_enlarge = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.entries.size(); ++i) {
      double e = enlargement(node.entries[i].box, box);
      if (e < best_enlarge ||
          (e == best_enlarge && node.entries[i].box.volume() < node.entries[best].box.volume())) {
        best_enlarge = e;
        best = i;
      }
    }
    page = node.entries[best].id;
    path.back().entry_index = best;
    path.push_back({page, 0});
    node = read_node(page);
  }

  node.entries.push_back(RTreeEntry{box, record_id});
  ++record_count_;

  // Walk back up, splitting overflowing nodes and keeping ancestor boxes
  // exactly equal to the union of their children.
  Mbb child_box;
  std::optional<std::pair<RTreeEntry, RTreeEntry>> pending_split;
  for (std::size_t level = path.size(); level-- > 0;) {
    const std::uint64_t page_id = path[level].page_id;
    RTreeNode cur = (level + 1 == path.size()) ? std::move(node) : read_node(page_id);
    if (level + 1 < path.size()) {
      const std::size_t slot = path[level].entry_index;
      if (pending_split) {
        cur.entries[slot] = pending_split->first;
        cur.entries.push_back(pending_split->second);
        pending_split.reset();
      } else {
        cur.entries[slot].box = child_box;
      }
    }
    const std::uint16_t cap = cur.is_leaf ? leaf_capacity_ : max_entries_;
    if (cur.entries.size() > cap) {
      auto [a, b] = split_node(cur, cur.is_leaf ? min_leaf_entries() : min_entries_);
      const std::uint64_t id_a = page_id;  // reuse the page for the first half
      const std::uint64_t id_b = allocate_page();
      write_node(id_a, a);
      write_node(id_b, b);
      pending_split = {RTreeEntry{node_box(a), id_a}, RTreeEntry{node_box(b), id_b}};
      if (level == 0) {
        RTreeNode new_root{false, {pending_split->first, pending_split->second}};
        root_ = append_node(new_root);
        ++height_;
        pending_split.reset();
      }
    } else {
      write_node(page_id, cur);
      child_box = node_box(cur);
    }
  }
  write_header();
}

// ---- queries ----

std::vector<std::uint64_t> RTree::point_query(std::span<const double> p) {
  check_same_dims(p.size(), k_);
  std::vector<std::uint64_t> out;
  if (height_ == 0) return out;
  std::vector<std::uint64_t> stack{root_};
  while (!stack.empty()) {
    const std::uint64_t page = stack.back();
    stack.pop_back();
    RTreeNode node = read_node(page);
    for (const RTreeEntry& e : node.entries) {
      if (!mbb_contains_point(e.box, p)) continue;
      if (node.is_leaf)
        out.push_back(e.id);
      else
        stack.push_back(e.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> RTree::range_query(const Mbb& window) {
  check_same_dims(window.dims(), k_);
  std::vector<std::uint64_t> out;
  if (height_ == 0) return out;
  std::vector<std::uint64_t> stack{root_};
  while (!stack.empty()) {
    const std::uint64_t page = stack.back();
    stack.pop_back();
    RTreeNode node = read_node(page);
    for (const RTreeEntry& e : node.entries) {
      if (!mbb_intersects(e.box, window)) continue;
      if (node.is_leaf)
        out.push_back(e.id);
      else
        stack.push_back(e.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::uint64_t, double>> RTree::knn(std::span<const double> q, std::size_t k_neighbors) {
  check_same_dims(q.size(), k_);
  if (k_neighbors < 1) fail(Errc::bad_params, "k must be at least 1");
  if (height_ == 0 || record_count_ == 0) fail(Errc::empty_tree, "knn on empty tree");

  struct Item {
    double dist;
    bool is_record;
    std::uint64_t id;

    bool operator>(const Item& o) const {
      if (dist != o.dist) return dist > o.dist;
      if (is_record != o.is_record) return !is_record;  // records pop first on ties
      return id > o.id;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push(Item{0.0, false, root_});
  std::vector<std::pair<std::uint64_t, double>> out;
  while (!pq.empty() && out.size() < k_neighbors) {
    Item top = pq.top();
    pq.pop();
    if (top.is_record) {
      out.emplace_back(top.id, top.dist);
      continue;
    }
    RTreeNode node = read_node(top.id);
    for (const RTreeEntry& e : node.entries)
      pq.push(Item{min_dist(e.box, q), node.is_leaf, e.id});
  }
  return out;
}

namespace {

void join_recurse(RTree& a, std::uint64_t page_a, std::uint16_t height_a, RTree& b, std::uint64_t page_b,
                  std::uint16_t height_b, double epsilon,
                  std::vector<std::pair<std::uint64_t, std::uint64_t>>& out) {
  RTreeNode na = a.read_node(page_a);
  RTreeNode nb = b.read_node(page_b);
  if (na.is_leaf && nb.is_leaf) {
    for (const RTreeEntry& ea : na.entries)
      for (const RTreeEntry& eb : nb.entries)
        if (mbb_gap(ea.box, eb.box) <= epsilon) out.emplace_back(ea.id, eb.id);
    return;
  }
  if (!na.is_leaf && (nb.is_leaf || height_a > height_b)) {
    // Descend the taller side only; boxes still prune child pairs.
    Mbb bbox = nb.entries.front().box;
    for (std::size_t i = 1; i < nb.entries.size(); ++i) bbox = mbb_union(bbox, nb.entries[i].box);
    for (const RTreeEntry& ea : na.entries)
      if (mbb_gap(ea.box, bbox) <= epsilon)
        join_recurse(a, ea.id, height_a - 1, b, page_b, height_b, epsilon, out);
    return;
  }
  if (!nb.is_leaf && (na.is_leaf || height_b > height_a)) {
    Mbb abox = na.entries.front().box;
    for (std::size_t i = 1; i < na.entries.size(); ++i) abox = mbb_union(abox, na.entries[i].box);
    for (const RTreeEntry& eb : nb.entries)
      if (mbb_gap(abox, eb.box) <= epsilon)
        join_recurse(a, page_a, height_a, b, eb.id, height_b - 1, epsilon, out);
    return;
  }
  // Equal heights, both internal: synchronized descent over child pairs.
  for (const RTreeEntry& ea : na.entries)
    for (const RTreeEntry& eb : nb.entries)
      if (mbb_gap(ea.box, eb.box) <= epsilon)
        join_recurse(a, ea.id, height_a - 1, b, eb.id, height_b - 1, epsilon, out);
}

}  // namespace

std::vector<std::pair<std::uint64_t, std::uint64_t>> RTree::spatial_join(RTree& a, RTree& b, double epsilon) {
  check_same_dims(a.k(), b.k());
  if (epsilon < 0.0) fail(Errc::bad_params, "epsilon must be non-negative");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  if (a.empty() || b.empty()) return out;
  join_recurse(a, a.root_, a.height_, b, b.root_, b.height_, epsilon, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ---- audit ----

namespace {

struct AuditState {
  RTreeAuditReport report;
  std::uint16_t leaf_depth = 0;
  bool leaf_depth_set = false;
};

Mbb audit_recurse(RTree& t, std::uint64_t page, std::uint16_t depth, bool is_root, bool allow_underfull,
                  AuditState& st) {
  RTreeNode node = t.read_node(page);
  ++st.report.pages;
  if (node.entries.empty()) fail(Errc::corrupt_header, "empty node page " + std::to_string(page));
  const std::uint16_t cap = node.is_leaf ? t.leaf_capacity() : t.max_entries();
  const std::uint16_t min_fill = node.is_leaf ? t.min_leaf_entries() : t.min_entries();
  if (node.entries.size() > cap) fail(Errc::corrupt_header, "node overflow");
  if (!is_root && node.entries.size() < min_fill) {
    if (node.is_leaf && allow_underfull && st.report.underfull_leaves == 0) {
      ++st.report.underfull_leaves;
    } else {
      fail(Errc::corrupt_header, "underfull node page " + std::to_string(page) + " (" +
                                     std::to_string(node.entries.size()) + " < " +
                                     std::to_string(min_fill) + ")");
    }
  }
  if (node.is_leaf) {
    ++st.report.leaves;
    st.report.records += node.entries.size();
    if (!st.leaf_depth_set) {
      st.leaf_depth = depth;
      st.leaf_depth_set = true;
    } else if (st.leaf_depth != depth) {
      fail(Errc::corrupt_header, "leaves at unequal depth");
    }
  } else {
    for (const RTreeEntry& e : node.entries) {
      Mbb child_box = audit_recurse(t, e.id, depth + 1, false, allow_underfull, st);
      if (!(child_box == e.box))
        fail(Errc::corrupt_header, "parent MBB is not the exact union of child page " + std::to_string(e.id));
    }
  }
  Mbb box = node.entries.front().box;
  for (std::size_t i = 1; i < node.entries.size(); ++i) box = mbb_union(box, node.entries[i].box);
  return box;
}

}  // namespace

RTreeAuditReport RTree::audit(bool allow_one_underfull_leaf) {
  AuditState st;
  st.report.height = height_;
  if (height_ == 0) return st.report;
  audit_recurse(*this, root_, 1, true, allow_one_underfull_leaf, st);
  if (st.leaf_depth != height_) fail(Errc::corrupt_header, "height does not match leaf depth");
  if (st.report.records != record_count_) fail(Errc::corrupt_header, "record count mismatch");
  return st.report;
}

}  // namespace sky
