#include "sky/bulkload.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "sky/bytes.hpp"

namespace sky {

// ---- scratch space ----

ScratchSpace::ScratchSpace(const std::string& path, std::uint16_t k, std::uint32_t page_size,
                           std::size_t cache_pages)
    : path_(path), k_(k), record_bytes_(std::size_t(8) * k + 8), page_size_(page_size) {
  if (k < 1) fail(Errc::bad_params, "k must be at least 1");
  per_page_ = page_size / record_bytes_;
  if (per_page_ < 1) fail(Errc::bad_params, "page smaller than one record");
  file_ = std::make_unique<PageFile>(path, page_size, /*truncate=*/true);
  cache_ = std::make_unique<PageCache>(*file_, cache_pages);
}

ScratchSpace::~ScratchSpace() {
  cache_.reset();
  file_.reset();
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

std::uint64_t ScratchSpace::pages_for(std::uint64_t count) const {
  return (count + per_page_ - 1) / per_page_;
}

ExternalRun ScratchSpace::allocate_run(std::uint64_t count) {
  const std::uint64_t pages = pages_for(count);
  for (std::size_t i = 0; i < free_.size(); ++i) {
    if (free_[i].count >= pages) {
      const std::uint64_t first = free_[i].first;
      free_[i].first += pages;
      free_[i].count -= pages;
      if (free_[i].count == 0) free_.erase(free_.begin() + std::ptrdiff_t(i));
      return ExternalRun(this, first, count);
    }
  }
  const std::uint64_t first = next_page_;
  next_page_ += pages;
  return ExternalRun(this, first, count);
}

void ScratchSpace::free_pages(std::uint64_t first_page, std::uint64_t count_pages) {
  if (count_pages > 0) free_.push_back(FreeRange{first_page, count_pages});
}

void ScratchSpace::read_record(std::uint64_t first_page, std::uint64_t slot, std::span<double> coords,
                               std::uint64_t& id) {
  const std::uint64_t page = first_page + slot / per_page_;
  const std::size_t off = std::size_t(slot % per_page_) * record_bytes_;
  std::vector<std::byte> buf(page_size_);
  cache_->read(page, buf);
  for (std::uint16_t d = 0; d < k_; ++d) coords[d] = get_f64(buf, off + 8 * d);
  id = get_u64(buf, off + 8 * k_);
}

ScratchSpace::Writer::Writer(ScratchSpace& space, const ExternalRun& run)
    : space_(space), first_page_(run.first_page()), capacity_(run.count()) {}

void ScratchSpace::Writer::append(std::span<const double> coords, std::uint64_t id) {
  if (written_ >= capacity_) fail(Errc::bad_params, "run writer past capacity");
  const std::uint64_t page = first_page_ + written_ / space_.per_page_;
  const std::size_t off = std::size_t(written_ % space_.per_page_) * space_.record_bytes_;
  std::vector<std::byte> rec(space_.record_bytes_);
  for (std::uint16_t d = 0; d < space_.k_; ++d) put_f64(rec, 8 * d, coords[d]);
  put_u64(rec, std::size_t(8) * space_.k_, id);
  space_.cache_->update(page, off, rec);
  ++written_;
}

ExternalRun::ExternalRun(ScratchSpace* space, std::uint64_t first_page, std::uint64_t count)
    : space_(space), first_page_(first_page), count_(count) {}

std::uint64_t ExternalRun::bytes() const { return count_ * (space_ ? space_->record_bytes() : 0); }

void ExternalRun::read_record(std::uint64_t slot, std::span<double> coords, std::uint64_t& id) const {
  if (slot >= count_) fail(Errc::bad_params, "slot out of run");
  space_->read_record(first_page_, slot, coords, id);
}

void ExternalRun::release() {
  if (!space_) return;
  space_->free_pages(first_page_, space_->pages_for(count_));
  space_ = nullptr;
  count_ = 0;
}

namespace {

// Sequential decoder over a run; fetches one page at a time through the
// cache and decodes records from a local copy.
class RunReader {
 public:
  explicit RunReader(const ExternalRun& run)
      : space_(run.space()),
        first_page_(run.first_page()),
        count_(run.count()),
        page_buf_(space_ ? space_->cache().file().page_size() : 0) {}

  bool next(std::span<double> coords, std::uint64_t& id) {
    if (pos_ >= count_) return false;
    const std::uint64_t per_page = space_->records_per_page();
    const std::uint64_t page = first_page_ + pos_ / per_page;
    if (page != loaded_) {
      space_->cache().read(page, page_buf_);
      loaded_ = page;
    }
    const std::size_t off = std::size_t(pos_ % per_page) * space_->record_bytes();
    for (std::uint16_t d = 0; d < space_->k(); ++d) coords[d] = get_f64(page_buf_, off + 8 * d);
    id = get_u64(page_buf_, off + std::size_t(8) * space_->k());
    ++pos_;
    return true;
  }

 private:
  ScratchSpace* space_;
  std::uint64_t first_page_, count_, pos_ = 0;
  std::vector<std::byte> page_buf_;
  std::uint64_t loaded_ = std::uint64_t(-1);
};

}  // namespace

// ---- split primitives ----

std::size_t choose_split_dim(const ExternalRun& run, std::vector<double>* variances) {
  if (!run.valid() || run.count() == 0) fail(Errc::empty_run, "choose_split_dim");
  const std::uint16_t k = run.space()->k();
  std::vector<double> sum(k, 0.0), sumsq(k, 0.0);
  std::vector<double> coords(k);
  std::uint64_t id = 0;
  RunReader rd(run);
  while (rd.next(coords, id)) {
    for (std::uint16_t d = 0; d < k; ++d) {
      sum[d] += coords[d];
      sumsq[d] += coords[d] * coords[d];
    }
  }
  const double n = double(run.count());
  std::size_t best = 0;
  double best_var = -1.0;
  std::vector<double> vars(k);
  for (std::uint16_t d = 0; d < k; ++d) {
    const double mean = sum[d] / n;
    vars[d] = std::max(0.0, sumsq[d] / n - mean * mean);
    if (vars[d] > best_var) {
      best_var = vars[d];
      best = d;
    }
  }
  if (variances) *variances = std::move(vars);
  return best;
}

std::uint64_t split_count(std::uint64_t n, std::size_t leaf_capacity) {
  if (leaf_capacity < 2) fail(Errc::bad_params, "leaf_capacity must be at least 2");
  if (n <= leaf_capacity) fail(Errc::no_split_needed, "n <= leaf_capacity");
  const std::uint64_t cap = leaf_capacity;
  const std::uint64_t buckets = (n + cap - 1) / cap;
  // Smallest t with 2^(t+1) >= buckets, i.e. left gets 2^ceil(log2(B/2)) buckets.
  unsigned t = 0;
  while ((std::uint64_t(1) << (t + 1)) < buckets) ++t;
  std::uint64_t left = cap << t;
  const std::uint64_t lo = cap;
  const std::uint64_t hi = std::max<std::uint64_t>(cap, n - cap);
  return std::clamp(left, lo, hi);
}

double sample_pivot(const ExternalRun& run, std::size_t dim, std::uint64_t target_rank,
                    std::size_t sample_size, Rng& rng) {
  const std::uint64_t n = run.count();
  if (!run.valid() || n == 0) fail(Errc::empty_run, "sample_pivot");
  if (sample_size < 1) fail(Errc::bad_params, "sample_size must be positive");
  const std::uint64_t s = std::min<std::uint64_t>(sample_size, n);

  std::vector<double> sample;
  sample.reserve(s);
  const std::uint16_t k = run.space()->k();
  std::vector<double> coords(k);
  std::uint64_t id = 0;
  RunReader rd(run);
  std::uint64_t i = 0;
  while (rd.next(coords, id)) {
    if (i < s) {
      sample.push_back(coords[dim]);
    } else {
      const std::uint64_t j = rng.next_below(i + 1);
      if (j < s) sample[j] = coords[dim];
    }
    ++i;
  }
  // Scale the target rank into the sample.
  const std::uint64_t r = std::clamp<std::uint64_t>((target_rank * s + n - 1) / n, 1, s);
  std::nth_element(sample.begin(), sample.begin() + std::ptrdiff_t(r - 1), sample.end());
  return sample[r - 1];
}

namespace {

struct SideCounts {
  std::uint64_t less = 0, equal = 0;
};

SideCounts count_sides(const ExternalRun& run, std::size_t dim, double pivot) {
  SideCounts c;
  const std::uint16_t k = run.space()->k();
  std::vector<double> coords(k);
  std::uint64_t id = 0;
  RunReader rd(run);
  while (rd.next(coords, id)) {
    if (coords[dim] < pivot)
      ++c.less;
    else if (coords[dim] == pivot)
      ++c.equal;
  }
  return c;
}

// New run holding the records matching `keep`, in stream order.
template <typename Pred>
ExternalRun materialize(const ExternalRun& run, Pred keep, std::uint64_t expected) {
  ExternalRun out = run.space()->allocate_run(expected);
  ScratchSpace::Writer w(*run.space(), out);
  const std::uint16_t k = run.space()->k();
  std::vector<double> coords(k);
  std::uint64_t id = 0;
  RunReader rd(run);
  while (rd.next(coords, id))
    if (keep(coords)) w.append(coords, id);
  if (w.written() != expected) fail(Errc::count_infeasible, "materialized count mismatch");
  return out;
}

}  // namespace

double external_select(const ExternalRun& input, std::size_t dim, std::uint64_t target_rank,
                       const VamSplitParams& params, Rng& rng) {
  if (!input.valid() || input.count() == 0) fail(Errc::empty_run, "external_select");
  if (target_rank < 1 || target_rank > input.count())
    fail(Errc::rank_out_of_range, "rank " + std::to_string(target_rank) + " of " + std::to_string(input.count()));

  ExternalRun cur = input;  // the input run itself is never released here
  bool owned = false;
  std::uint64_t rank = target_rank;
  while (cur.bytes() > params.memory_budget) {
    const double pivot = sample_pivot(cur, dim, rank, params.sample_size, rng);
    const SideCounts c = count_sides(cur, dim, pivot);
    if (rank <= c.less) {
      ExternalRun next = materialize(cur, [&](std::span<const double> v) { return v[dim] < pivot; }, c.less);
      if (owned) cur.release();
      cur = next;
      owned = true;
    } else if (rank <= c.less + c.equal) {
      if (owned) cur.release();
      return pivot;  // the rank falls in the equal band: exact already
    } else {
      const std::uint64_t greater = cur.count() - c.less - c.equal;
      ExternalRun next =
          materialize(cur, [&](std::span<const double> v) { return v[dim] > pivot; }, greater);
      rank -= c.less + c.equal;
      if (owned) cur.release();
      cur = next;
      owned = true;
    }
  }

  std::vector<double> vals;
  vals.reserve(cur.count());
  {
    const std::uint16_t k = cur.space()->k();
    std::vector<double> coords(k);
    std::uint64_t id = 0;
    RunReader rd(cur);
    while (rd.next(coords, id)) vals.push_back(coords[dim]);
  }
  std::nth_element(vals.begin(), vals.begin() + std::ptrdiff_t(rank - 1), vals.end());
  const double v = vals[rank - 1];
  if (owned) cur.release();
  return v;
}

std::pair<ExternalRun, ExternalRun> partition_run(ExternalRun& run, std::size_t dim, double pivot,
                                                  std::uint64_t exact_left_count) {
  if (!run.valid() || run.count() == 0) fail(Errc::empty_run, "partition_run");
  const std::uint64_t n = run.count();
  if (exact_left_count < 1 || exact_left_count >= n)
    fail(Errc::bad_params, "left count must split the run");
  const SideCounts c = count_sides(run, dim, pivot);
  if (c.less > exact_left_count || c.less + c.equal < exact_left_count)
    fail(Errc::count_infeasible, "pivot cannot realize the left count");

  ExternalRun left = run.space()->allocate_run(exact_left_count);
  ExternalRun right = run.space()->allocate_run(n - exact_left_count);
  ScratchSpace::Writer wl(*run.space(), left), wr(*run.space(), right);
  std::uint64_t equal_quota = exact_left_count - c.less;
  const std::uint16_t k = run.space()->k();
  std::vector<double> coords(k);
  std::uint64_t id = 0;
  RunReader rd(run);
  while (rd.next(coords, id)) {
    if (coords[dim] < pivot) {
      wl.append(coords, id);
    } else if (coords[dim] > pivot) {
      wr.append(coords, id);
    } else if (equal_quota > 0) {
      wl.append(coords, id);
      --equal_quota;
    } else {
      wr.append(coords, id);
    }
  }
  run.release();
  return {left, right};
}

// ---- bulk build ----

namespace {

struct LeafRef {
  std::uint64_t page_id;
  Mbb box;
};

struct BuildContext {
  RTree* out;
  const VamSplitParams* params;
  std::vector<LeafRef> leaves;
  BuildLog log;
  std::ostream* report;
  ScratchSpace* scratch;
  Rng rng{0};

  void log_split(std::size_t dim, std::uint64_t n, std::uint64_t left, double pivot,
                 std::vector<double> variances) {
    SplitEvent ev{dim, n, left, pivot, std::move(variances), scratch->io()};
    if (report) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", pivot);
      *report << "split dim=" << ev.dimension << " n=" << ev.n << " left=" << ev.left << " pivot=" << buf
              << " io_reads=" << ev.io.reads << " io_writes=" << ev.io.writes << "\n";
    }
    log.splits.push_back(std::move(ev));
  }

  void emit_leaf(const std::vector<double>& coords, const std::vector<std::uint64_t>& ids) {
    const std::uint16_t k = out->k();
    RTreeNode leaf;
    leaf.is_leaf = true;
    leaf.entries.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::span<const double> p(coords.data() + i * k, k);
      leaf.entries.push_back(RTreeEntry{Mbb::point(p), ids[i]});
    }
    Mbb box = leaf.entries.front().box;
    for (std::size_t i = 1; i < leaf.entries.size(); ++i) box = mbb_union(box, leaf.entries[i].box);
    leaves.push_back(LeafRef{out->append_node(leaf), std::move(box)});
  }
};

// In-memory recursion over flat (coords, ids); same split rules as the
// external path, so the resulting leaves are identical record sets.
void build_mem(std::vector<double> coords, std::vector<std::uint64_t> ids, BuildContext& ctx) {
  const std::size_t n = ids.size();
  const std::uint16_t k = ctx.out->k();
  const std::size_t cap = ctx.params->leaf_capacity;
  if (n <= cap) {
    ctx.emit_leaf(coords, ids);
    return;
  }
  std::vector<double> vars(k);
  std::size_t dim = 0;
  {
    double best = -1.0;
    for (std::uint16_t d = 0; d < k; ++d) {
      double sum = 0.0, sumsq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = coords[i * k + d];
        sum += v;
        sumsq += v * v;
      }
      const double mean = sum / double(n);
      vars[d] = std::max(0.0, sumsq / double(n) - mean * mean);
      if (vars[d] > best) {
        best = vars[d];
        dim = d;
      }
    }
  }
  const std::uint64_t left_count = split_count(n, cap);
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = coords[i * k + dim];
  std::nth_element(vals.begin(), vals.begin() + std::ptrdiff_t(left_count - 1), vals.end());
  const double pivot = vals[left_count - 1];

  std::uint64_t less = 0, equal = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = coords[i * k + dim];
    if (v < pivot)
      ++less;
    else if (v == pivot)
      ++equal;
  }
  std::uint64_t equal_quota = left_count - less;
  std::vector<double> lc, rc;
  std::vector<std::uint64_t> li, ri;
  lc.reserve(left_count * k);
  rc.reserve((n - left_count) * k);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = coords[i * k + dim];
    bool to_left = v < pivot || (v == pivot && equal_quota > 0);
    if (v == pivot && equal_quota > 0) --equal_quota;
    auto& dst_c = to_left ? lc : rc;
    auto& dst_i = to_left ? li : ri;
    dst_c.insert(dst_c.end(), coords.begin() + std::ptrdiff_t(i * k), coords.begin() + std::ptrdiff_t((i + 1) * k));
    dst_i.push_back(ids[i]);
  }
  coords.clear();
  coords.shrink_to_fit();
  ids.clear();
  ids.shrink_to_fit();
  ctx.log_split(dim, n, left_count, pivot, std::move(vars));
  build_mem(std::move(lc), std::move(li), ctx);
  build_mem(std::move(rc), std::move(ri), ctx);
}

void build_ext(ExternalRun run, BuildContext& ctx) {
  const std::uint64_t n = run.count();
  const std::size_t cap = ctx.params->leaf_capacity;
  const std::uint16_t k = ctx.out->k();
  if (n <= cap || run.bytes() <= ctx.params->memory_budget) {
    std::vector<double> coords(n * k);
    std::vector<std::uint64_t> ids(n);
    std::vector<double> rec(k);
    std::uint64_t id = 0;
    RunReader rd(run);
    std::size_t i = 0;
    while (rd.next(rec, id)) {
      std::copy(rec.begin(), rec.end(), coords.begin() + std::ptrdiff_t(i * k));
      ids[i] = id;
      ++i;
    }
    run.release();
    build_mem(std::move(coords), std::move(ids), ctx);
    return;
  }
  std::vector<double> vars;
  const std::size_t dim = choose_split_dim(run, &vars);
  const std::uint64_t left_count = split_count(n, cap);
  const double pivot = external_select(run, dim, left_count, *ctx.params, ctx.rng);
  auto [left, right] = partition_run(run, dim, pivot, left_count);
  ctx.log_split(dim, n, left_count, pivot, std::move(vars));
  build_ext(left, ctx);
  build_ext(right, ctx);
}

// Packs one level of pages into parent nodes: consecutive children in
// recursion order, full M per node except that the last two nodes
// rebalance when the tail would fall under the minimum fill.
std::vector<LeafRef> pack_level(const std::vector<LeafRef>& level, RTree& out, std::uint16_t fanout,
                                std::uint16_t min_fill) {
  std::vector<std::size_t> sizes;
  {
    std::size_t remaining = level.size();
    while (remaining > fanout) {
      sizes.push_back(fanout);
      remaining -= fanout;
    }
    sizes.push_back(remaining);
    if (sizes.size() >= 2 && sizes.back() < min_fill) {
      const std::size_t need = min_fill - sizes.back();
      sizes[sizes.size() - 2] -= need;
      sizes.back() += need;
    }
  }
  std::vector<LeafRef> parents;
  parents.reserve(sizes.size());
  std::size_t at = 0;
  for (std::size_t sz : sizes) {
    RTreeNode node;
    node.is_leaf = false;
    node.entries.reserve(sz);
    Mbb box = level[at].box;
    for (std::size_t i = 0; i < sz; ++i) {
      node.entries.push_back(RTreeEntry{level[at + i].box, level[at + i].page_id});
      box = mbb_union(box, level[at + i].box);
    }
    at += sz;
    parents.push_back(LeafRef{out.append_node(node), std::move(box)});
  }
  return parents;
}

}  // namespace

BuildLog vamsplit_build(std::span<const std::vector<double>> points, const std::string& rtree_path,
                        const VamSplitParams& params, std::ostream* report) {
  if (points.empty()) fail(Errc::empty_input, "bulk build over an empty dataset");
  const std::uint16_t k = std::uint16_t(points[0].size());
  for (const auto& p : points) check_same_dims(p.size(), k);
  if (params.leaf_capacity < 2) fail(Errc::bad_params, "leaf_capacity must be at least 2");
  if (params.sample_size < 1) fail(Errc::bad_params, "sample_size must be positive");
  if (params.memory_budget < params.page_size) fail(Errc::bad_params, "memory_budget below one page");

  const std::uint16_t fit = rtree_page_fanout(params.page_size, k);
  if (params.leaf_capacity > fit)
    fail(Errc::bad_params, "leaf_capacity exceeds page capacity " + std::to_string(fit));
  const std::uint16_t fanout =
      params.internal_fanout == 0 ? fit : std::min<std::uint16_t>(params.internal_fanout, fit);
  if (fanout < 2) fail(Errc::bad_params, "internal fanout must be at least 2");

  RTreeOptions opts;
  opts.page_size = params.page_size;
  opts.cache_pages = params.cache_pages;
  opts.max_entries = std::max<std::uint16_t>(fanout, std::uint16_t(params.leaf_capacity));
  opts.leaf_capacity = std::uint16_t(params.leaf_capacity);
  RTree out = RTree::create(rtree_path, k, opts);

  ScratchSpace scratch(rtree_path + ".scratch", k, params.page_size, params.cache_pages);
  BuildContext ctx;
  ctx.out = &out;
  ctx.params = &params;
  ctx.report = report;
  ctx.scratch = &scratch;
  ctx.rng = Rng(params.seed);

  ExternalRun all = scratch.allocate_run(points.size());
  {
    ScratchSpace::Writer w(scratch, all);
    for (std::size_t i = 0; i < points.size(); ++i) w.append(points[i], i);
  }
  build_ext(all, ctx);

  ctx.log.leaf_pages = ctx.leaves.size();
  std::vector<LeafRef> level = std::move(ctx.leaves);
  std::uint16_t height = 1;
  const std::uint16_t min_fill = std::uint16_t((std::size_t(fanout) * 2 + 4) / 5);
  while (level.size() > 1) {
    level = pack_level(level, out, fanout, min_fill);
    ++height;
  }
  out.finalize(level.front().page_id, height, points.size());
  ctx.log.scratch_io = scratch.io();
  return ctx.log;
}

BuildLog vamsplit_build(const RecordStore& store, const std::vector<std::string>& key_columns,
                        const std::string& rtree_path, const VamSplitParams& params,
                        std::ostream* report) {
  if (store.record_count() == 0) fail(Errc::empty_input, "empty store");
  if (key_columns.empty()) fail(Errc::bad_params, "no key columns");
  std::vector<std::vector<double>> cols;
  cols.reserve(key_columns.size());
  for (const auto& name : key_columns) cols.push_back(store.numeric_column(name));
  std::vector<std::vector<double>> points(store.record_count(), std::vector<double>(key_columns.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t d = 0; d < cols.size(); ++d) points[i][d] = cols[d][i];
  return vamsplit_build(points, rtree_path, params, report);
}

}  // namespace sky
