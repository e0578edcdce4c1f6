#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sky/bulkload.hpp"
#include "sky/random.hpp"
#include "test_util.hpp"

using namespace sky;

namespace {

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(k));
  for (auto& p : pts)
    for (auto& c : p) c = 1000.0 * rng.next_double();
  return pts;
}

// Leaf count of the split recursion alone.
std::uint64_t leaves_by_recursion(std::uint64_t n, std::size_t cap) {
  if (n <= cap) return 1;
  const std::uint64_t left = split_count(n, cap);
  return leaves_by_recursion(left, cap) + leaves_by_recursion(n - left, cap);
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("split_count: worked examples") {
  // 100 records, capacity 10: 10 buckets, half rounds up to 8 -> 80 left.
  CHECK(split_count(100, 10) == 80);
  CHECK(split_count(20, 10) == 10);  // n = 2*cap: exact median
  CHECK_FAILS_WITH(Errc::no_split_needed, split_count(10, 10));
  // n < 2*cap still splits, right side becomes the one non-full leaf.
  CHECK(split_count(11, 10) == 10);
}

TEST_CASE("split_count: full recursion meets the exact bucket bound") {
  for (std::size_t cap : {4, 10, 64}) {
    for (std::uint64_t n = cap + 1; n <= 3000; ++n) {
      const std::uint64_t want = (n + cap - 1) / cap;
      CHECK(leaves_by_recursion(n, cap) == want);
    }
  }
}

TEST_CASE("scratch runs: write, read back, release and reuse") {
  TempDir tmp("scratch");
  ScratchSpace space(tmp.path("s.scratch"), 2, 4096, 8);
  ExternalRun run = space.allocate_run(100);
  {
    ScratchSpace::Writer w(space, run);
    for (std::uint64_t i = 0; i < 100; ++i)
      w.append(std::vector<double>{double(i), double(2 * i)}, i);
  }
  std::vector<double> coords(2);
  std::uint64_t id = 0;
  run.read_record(42, coords, id);
  CHECK(coords[0] == 42.0);
  CHECK(coords[1] == 84.0);
  CHECK(id == 42);

  const std::uint64_t first = run.first_page();
  run.release();
  ExternalRun again = space.allocate_run(50);
  CHECK(again.first_page() == first);  // freed pages are reused first-fit
}

TEST_CASE("choose_split_dim: maximum variance, ties to the lowest index") {
  TempDir tmp("dim");
  ScratchSpace space(tmp.path("s.scratch"), 2, 4096, 8);
  ExternalRun run = space.allocate_run(3);
  {
    ScratchSpace::Writer w(space, run);
    w.append(std::vector<double>{0.0, 0.0}, 0);
    w.append(std::vector<double>{10.0, 1.0}, 1);
    w.append(std::vector<double>{20.0, 2.0}, 2);
  }
  std::vector<double> vars;
  CHECK(choose_split_dim(run, &vars) == 0);
  // Direct computation: var({0,10,20}) = 200/3, var({0,1,2}) = 2/3.
  CHECK(vars[0] == doctest::Approx(200.0 / 3).epsilon(1e-12));
  CHECK(vars[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));

  ExternalRun constant = space.allocate_run(4);
  {
    ScratchSpace::Writer w(space, constant);
    for (int i = 0; i < 4; ++i) w.append(std::vector<double>{7.0, 7.0}, i);
  }
  CHECK(choose_split_dim(constant) == 0);  // all variances zero: lowest wins
}

TEST_CASE("sample_pivot: whole-population sample returns the exact rank") {
  TempDir tmp("pivot");
  ScratchSpace space(tmp.path("s.scratch"), 1, 4096, 8);
  Rng rng(42);
  ExternalRun run = space.allocate_run(101);
  std::vector<double> vals;
  {
    ScratchSpace::Writer w(space, run);
    Rng data_rng(9);
    for (std::uint64_t i = 0; i < 101; ++i) {
      const double v = data_rng.next_double();
      vals.push_back(v);
      w.append(std::vector<double>{v}, i);
    }
  }
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint64_t rank : {std::uint64_t(1), std::uint64_t(51), std::uint64_t(101)})
    CHECK(sample_pivot(run, 0, rank, 1000, rng) == sorted[rank - 1]);
}

TEST_CASE("sample_pivot: sampled pivots land near the target rank") {
  TempDir tmp("pivot_stat");
  ScratchSpace space(tmp.path("s.scratch"), 1, 4096, 16);
  const std::uint64_t n = 100000;
  ExternalRun run = space.allocate_run(n);
  std::vector<double> vals;
  {
    ScratchSpace::Writer w(space, run);
    Rng data_rng(77);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = data_rng.next_double();
      vals.push_back(v);
      w.append(std::vector<double>{v}, i);
    }
  }
  std::sort(vals.begin(), vals.end());
  const std::uint64_t target = n / 2;
  int close = 0;
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const double pivot = sample_pivot(run, 0, target, 1024, rng);
    const std::uint64_t rank =
        std::uint64_t(std::lower_bound(vals.begin(), vals.end(), pivot) - vals.begin()) + 1;
    if (rank > target - n / 10 && rank < target + n / 10) ++close;
  }
  CHECK(close >= 95);
}

TEST_CASE("external_select: equals sort-based selection under a tiny memory budget") {
  TempDir tmp("select");
  ScratchSpace space(tmp.path("s.scratch"), 2, 4096, 16);
  const std::uint64_t n = 20000;
  ExternalRun run = space.allocate_run(n);
  std::vector<double> vals;
  {
    ScratchSpace::Writer w(space, run);
    Rng data_rng(555);
    for (std::uint64_t i = 0; i < n; ++i) {
      // Duplicates on purpose: quantized values.
      const double v = std::floor(data_rng.next_double() * 500.0);
      vals.push_back(v);
      w.append(std::vector<double>{v, data_rng.next_double()}, i);
    }
  }
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());

  VamSplitParams params;
  params.memory_budget = 16 * 1024;  // forces external passes (run is 480 KB)
  params.sample_size = 256;
  Rng rng(99);
  for (std::uint64_t rank : {std::uint64_t(1), std::uint64_t(2), std::uint64_t(777), n / 2, n - 1, n}) {
    CHECK(external_select(run, 0, rank, params, rng) == sorted[rank - 1]);
  }
  CHECK(run.count() == n);  // the input run is preserved
  CHECK_FAILS_WITH(Errc::rank_out_of_range, external_select(run, 0, 0, params, rng));
  CHECK_FAILS_WITH(Errc::rank_out_of_range, external_select(run, 0, n + 1, params, rng));
}

TEST_CASE("partition_run: exact left count with duplicate pivots") {
  TempDir tmp("part");
  ScratchSpace space(tmp.path("s.scratch"), 1, 4096, 8);
  const std::uint64_t n = 1000;
  ExternalRun run = space.allocate_run(n);
  {
    ScratchSpace::Writer w(space, run);
    Rng data_rng(31);
    for (std::uint64_t i = 0; i < n; ++i)
      w.append(std::vector<double>{std::floor(data_rng.next_double() * 10.0)}, i);
  }
  VamSplitParams params;
  Rng rng(7);
  const std::uint64_t left_count = 400;
  const double pivot = external_select(run, 0, left_count, params, rng);
  auto [left, right] = partition_run(run, 0, pivot, left_count);
  CHECK(left.count() == left_count);
  CHECK(right.count() == n - left_count);
  // Every left record <= pivot, every right record >= pivot, and the two
  // sides partition the ids.
  std::vector<bool> seen(n, false);
  std::vector<double> c(1);
  std::uint64_t id = 0;
  for (std::uint64_t i = 0; i < left.count(); ++i) {
    left.read_record(i, c, id);
    CHECK(c[0] <= pivot);
    CHECK(!seen[id]);
    seen[id] = true;
  }
  for (std::uint64_t i = 0; i < right.count(); ++i) {
    right.read_record(i, c, id);
    CHECK(c[0] >= pivot);
    CHECK(!seen[id]);
    seen[id] = true;
  }
  CHECK(std::count(seen.begin(), seen.end(), false) == 0);

  // All-equal coordinates: any stable assignment meeting the count.
  ExternalRun flat = space.allocate_run(10);
  {
    ScratchSpace::Writer w(space, flat);
    for (std::uint64_t i = 0; i < 10; ++i) w.append(std::vector<double>{5.0}, i);
  }
  auto [fl, fr] = partition_run(flat, 0, 5.0, 4);
  CHECK(fl.count() == 4);
  CHECK(fr.count() == 6);
  // Infeasible pivot signals a selection bug.
  ExternalRun odd = space.allocate_run(4);
  {
    ScratchSpace::Writer w(space, odd);
    for (std::uint64_t i = 0; i < 4; ++i) w.append(std::vector<double>{double(i)}, i);
  }
  CHECK_FAILS_WITH(Errc::count_infeasible, partition_run(odd, 0, 0.0, 3));
}

TEST_CASE("partition cache: more cache pages, strictly fewer physical writes") {
  TempDir tmp("cache_io");
  const std::uint64_t n = 20000;
  // Exact median pivot so the left count is realizable.
  double pivot;
  {
    std::vector<double> vals;
    Rng data_rng(13);
    for (std::uint64_t i = 0; i < n; ++i) vals.push_back(data_rng.next_double());
    std::nth_element(vals.begin(), vals.begin() + std::ptrdiff_t(n / 2 - 1), vals.end());
    pivot = vals[n / 2 - 1];
  }
  auto run_with_cache = [&](std::size_t cache_pages, const std::string& tag) {
    ScratchSpace space(tmp.path(tag), 1, 4096, cache_pages);
    ExternalRun run = space.allocate_run(n);
    {
      ScratchSpace::Writer w(space, run);
      Rng data_rng(13);
      for (std::uint64_t i = 0; i < n; ++i) w.append(std::vector<double>{data_rng.next_double()}, i);
    }
    space.reset_io();
    auto [left, right] = partition_run(run, 0, pivot, n / 2);
    // Outputs must be identical regardless of cache size.
    std::vector<double> c(1);
    std::uint64_t id = 0;
    std::vector<std::uint64_t> left_ids;
    for (std::uint64_t i = 0; i < left.count(); ++i) {
      left.read_record(i, c, id);
      left_ids.push_back(id);
    }
    return std::pair{space.io().writes, left_ids};
  };
  auto [writes_small, ids_small] = run_with_cache(1, "small.scratch");
  auto [writes_large, ids_large] = run_with_cache(64, "large.scratch");
  CHECK(ids_small == ids_large);
  CHECK(writes_large < writes_small);
}

TEST_CASE("vamsplit: single leaf for tiny inputs") {
  TempDir tmp("vam_tiny");
  Rng rng(1);
  auto pts = random_points(10, 2, rng);
  VamSplitParams params;
  params.leaf_capacity = 16;
  BuildLog log = vamsplit_build(pts, tmp.path("t.rt"), params);
  CHECK(log.leaf_pages == 1);
  RTree tree = RTree::open(tmp.path("t.rt"));
  CHECK(tree.height() == 1);
  CHECK(tree.record_count() == 10);
  tree.audit(true);
}

TEST_CASE("vamsplit: bucket minimality, permutation and audit across sizes") {
  TempDir tmp("vam_minimal");
  Rng rng(2);
  for (std::size_t cap : {4, 10, 64}) {
    for (std::size_t n : {5, 63, 64, 65, 100, 999, 1000, 2048}) {
      if (n <= cap) continue;
      auto pts = random_points(n, 2, rng);
      VamSplitParams params;
      params.leaf_capacity = cap;
      const std::string path = tmp.path("t" + std::to_string(cap) + "_" + std::to_string(n) + ".rt");
      BuildLog log = vamsplit_build(pts, path, params);
      CHECK(log.leaf_pages == (n + cap - 1) / cap);

      RTree tree = RTree::open(path);
      auto report = tree.audit(true);
      CHECK(report.leaves == log.leaf_pages);
      CHECK(report.records == n);

      // Permutation property: every id stored exactly once, at its point.
      auto all = tree.range_query(Mbb({-1e12, -1e12}, {1e12, 1e12}));
      REQUIRE(all.size() == n);
      for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
      for (std::size_t i = 0; i < n; i += n / 7 + 1) {
        auto ids = tree.point_query(pts[i]);
        CHECK(std::find(ids.begin(), ids.end(), i) != ids.end());
      }
    }
  }
}

TEST_CASE("vamsplit: split dimension had maximal variance at split time") {
  TempDir tmp("vam_dim");
  Rng rng(3);
  auto pts = random_points(2000, 3, rng);
  VamSplitParams params;
  params.leaf_capacity = 32;
  BuildLog log = vamsplit_build(pts, tmp.path("t.rt"), params);
  CHECK(!log.splits.empty());
  for (const SplitEvent& ev : log.splits) {
    REQUIRE(!ev.variances.empty());
    double best = *std::max_element(ev.variances.begin(), ev.variances.end());
    CHECK(ev.variances[ev.dimension] == best);
    CHECK(ev.left == split_count(ev.n, params.leaf_capacity));
  }
}

TEST_CASE("vamsplit: deterministic and identical across memory budgets") {
  TempDir tmp("vam_deter");
  Rng rng(4);
  auto pts = random_points(5000, 2, rng);

  VamSplitParams params;
  params.leaf_capacity = 16;
  params.seed = 42;
  vamsplit_build(pts, tmp.path("a.rt"), params);
  vamsplit_build(pts, tmp.path("b.rt"), params);
  CHECK(file_bytes(tmp.path("a.rt")) == file_bytes(tmp.path("b.rt")));

  // The external route must produce the same tree as the in-memory route.
  params.memory_budget = 8 * 1024;
  vamsplit_build(pts, tmp.path("c.rt"), params);
  CHECK(file_bytes(tmp.path("a.rt")) == file_bytes(tmp.path("c.rt")));

  std::ostringstream report;
  params.memory_budget = 8 * 1024;
  vamsplit_build(pts, tmp.path("d.rt"), params, &report);
  CHECK(report.str().find("split dim=") != std::string::npos);
  CHECK(report.str().find("io_reads=") != std::string::npos);
}

TEST_CASE("vamsplit: oracle equivalence for queries on the bulk tree") {
  TempDir tmp("vam_oracle");
  Rng rng(5);
  auto pts = random_points(3000, 2, rng);
  VamSplitParams params;
  params.leaf_capacity = 32;
  vamsplit_build(pts, tmp.path("t.rt"), params);
  RTree tree = RTree::open(tmp.path("t.rt"));

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lo{1000.0 * rng.next_double(), 1000.0 * rng.next_double()};
    Mbb window(lo, {lo[0] + 50.0, lo[1] + 50.0});
    auto got = tree.range_query(window);
    std::vector<std::uint64_t> want;
    for (std::uint64_t i = 0; i < pts.size(); ++i)
      if (mbb_contains_point(window, pts[i])) want.push_back(i);
    CHECK(got == want);
  }
}
