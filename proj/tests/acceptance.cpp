// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sky/birch.hpp"
#include "sky/bulkload.hpp"
#include "sky/catalog.hpp"
#include "sky/clique.hpp"
#include "sky/config.hpp"
#include "sky/cure.hpp"
#include "sky/error.hpp"
#include "sky/geom.hpp"
#include "sky/htm.hpp"
#include "sky/kdtree.hpp"
#include "sky/mbb.hpp"
#include "sky/random.hpp"
#include "sky/rtree.hpp"
#include "sky/svc.hpp"
#include "sky/warehouse.hpp"

using namespace sky;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::filesystem::path g_workdir;

std::string wpath(const std::string& name) { return (g_workdir / name).string(); }

double elapsed_ms(std::function<void()> fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<Point> random_points(std::size_t n, std::size_t k, Rng& rng, double scale = 1000.0) {
  std::vector<Point> pts(n, Point(k));
  for (auto& p : pts)
    for (auto& c : p) c = scale * rng.next_double();
  return pts;
}

std::vector<Point> clustered_points(std::size_t n, std::size_t k, Rng& rng, std::size_t blobs = 20) {
  std::vector<Point> centers = random_points(blobs, k, rng);
  std::vector<Point> pts(n, Point(k));
  for (std::size_t i = 0; i < n; ++i) {
    const Point& c = centers[rng.next_below(blobs)];
    for (std::size_t d = 0; d < k; ++d) pts[i][d] = c[d] + 10.0 * rng.next_gaussian();
  }
  return pts;
}

// ---- criterion 1: oracle equivalence for KD-tree and R-tree queries ----

Outcome criterion_oracles() {
  Outcome out;
  Rng rng(1001);
  int instances = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1000 + rng.next_below(9001);  // 10^3 .. 10^4
    auto pts = random_points(n, 2, rng);

    KdTree kd = KdTree::build(pts, KdBuildParams{8, 0.0, KdSplitRule::cycle_median});
    const std::string rt_path = wpath("oracle_" + std::to_string(inst) + ".rt");
    VamSplitParams vparams;
    vparams.leaf_capacity = 64;
    vamsplit_build(pts, rt_path, vparams);
    RTree rt = RTree::open(rt_path);

    for (int trial = 0; trial < 5; ++trial) {
      Point lo{1000.0 * rng.next_double(), 1000.0 * rng.next_double()};
      Point hi{lo[0] + 100.0 * rng.next_double(), lo[1] + 100.0 * rng.next_double()};
      std::vector<std::size_t> want;
      for (std::size_t i = 0; i < n; ++i)
        if (pts[i][0] >= lo[0] && pts[i][0] <= hi[0] && pts[i][1] >= lo[1] && pts[i][1] <= hi[1])
          want.push_back(i);

      auto kd_got = kd.range_query(KdBox{lo, hi});
      std::sort(kd_got.begin(), kd_got.end());
      out.require(kd_got == want, "kd range mismatch");

      auto rt_got = rt.range_query(Mbb(lo, hi));
      std::vector<std::uint64_t> want64(want.begin(), want.end());
      out.require(rt_got == want64, "rtree range mismatch");

      // Point query through both trees.
      const Point& probe = pts[rng.next_below(n)];
      auto rt_pt = rt.point_query(probe);
      out.require(std::find(rt_pt.begin(), rt_pt.end(),
                            std::uint64_t(&probe - pts.data())) != rt_pt.end(),
                  "rtree point query missed a stored point");
    }

    for (int trial = 0; trial < 5; ++trial) {
      Point q{1000.0 * rng.next_double(), 1000.0 * rng.next_double()};
      const std::size_t k_nb = 1 + rng.next_below(10);
      std::vector<std::pair<double, std::size_t>> order(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::hypot(pts[i][0] - q[0], pts[i][1] - q[1]);
        order[i] = {d, i};
      }
      std::sort(order.begin(), order.end());

      auto kd_got = kd.knn(q, k_nb);
      auto rt_got = rt.knn(q, k_nb);
      out.require(kd_got.size() == k_nb && rt_got.size() == k_nb, "knn size");
      for (std::size_t i = 0; i < k_nb; ++i) {
        out.require(kd_got[i].index == order[i].second, "kd knn mismatch");
        out.require(rt_got[i].first == order[i].second, "rtree knn mismatch");
      }
    }
    ++instances;
  }

  // Spatial join vs the all-pairs filter on paired catalogs.
  for (int inst = 0; inst < 5; ++inst) {
    const std::size_t n = 500;
    auto pa = random_points(n, 2, rng, 1.0);
    auto pb = random_points(n, 2, rng, 1.0);
    const std::string ap = wpath("join_a_" + std::to_string(inst) + ".rt");
    const std::string bp = wpath("join_b_" + std::to_string(inst) + ".rt");
    VamSplitParams vparams;
    vparams.leaf_capacity = 32;
    vamsplit_build(pa, ap, vparams);
    vamsplit_build(pb, bp, vparams);
    RTree ta = RTree::open(ap), tb = RTree::open(bp);
    const double eps = 0.01;
    auto got = RTree::spatial_join(ta, tb, eps);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> want;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::hypot(pa[i][0] - pb[j][0], pa[i][1] - pb[j][1]) <= eps) want.emplace_back(i, j);
    std::sort(want.begin(), want.end());
    out.require(got == want, "spatial join mismatch");
  }
  out.detail = std::to_string(instances) + " randomized instances + 5 join instances, exact";
  return out;
}

// ---- criterion 2: HTM tiling ----

Outcome criterion_htm() {
  Outcome out;
  for (int level = 0; level <= 5; ++level) {
    double total = 0.0;
    for (const TrixelId& id : all_trixels(level)) total += trixel_triangle(id).area();
    out.require(std::abs(total - 4.0 * std::numbers::pi) < 1e-6,
                "area sum off at level " + std::to_string(level));
  }
  out.require(all_trixels(5).size() == 8192, "level-5 trixel count");

  Rng rng(2002);
  for (int i = 0; i < 10000; ++i) {
    const double z = 2.0 * rng.next_double() - 1.0;
    const SphericalPoint p{360.0 * rng.next_double(), rad_to_deg(std::asin(z))};
    const TrixelId id = locate(p, 5);
    out.require(trixel_triangle(id).contains(p.unit_vector()), "locate not contained geometrically");
  }
  out.detail = "levels 0-5 tile to 4*pi (1e-6), 10^4 locates verified, 8192 level-5 trixels";
  return out;
}

// ---- criterion 3: VAMSplit bucket minimality ----

std::uint64_t leaves_by_recursion(std::uint64_t n, std::size_t cap) {
  if (n <= cap) return 1;
  const std::uint64_t left = split_count(n, cap);
  return leaves_by_recursion(left, cap) + leaves_by_recursion(n - left, cap);
}

Outcome criterion_bucket_minimality() {
  Outcome out;
  // The split recursion drives the leaf count; check it exhaustively.
  for (std::size_t cap : {4, 10, 64}) {
    for (std::uint64_t n = 1; n <= 10000; ++n) {
      const std::uint64_t want = (n + cap - 1) / cap;
      if (leaves_by_recursion(n, cap) != want) {
        out.require(false, "recursion leaf count wrong at n=" + std::to_string(n) +
                               " cap=" + std::to_string(cap));
        break;
      }
    }
  }
  // Cross-check with real builds on a spread of sizes.
  Rng rng(3003);
  for (std::size_t cap : {4, 10, 64}) {
    for (std::uint64_t n : {5, 11, 64, 65, 128, 129, 1000, 4097, 9999, 10000}) {
      if (n <= cap) continue;
      auto pts = random_points(n, 2, rng);
      VamSplitParams params;
      params.leaf_capacity = cap;
      BuildLog log = vamsplit_build(pts, wpath("minimal.rt"), params);
      const std::uint64_t want = (n + cap - 1) / cap;
      out.require(log.leaf_pages == want, "built leaf count wrong at n=" + std::to_string(n) +
                                              " cap=" + std::to_string(cap));
      RTree tree = RTree::open(wpath("minimal.rt"));
      auto report = tree.audit(true);
      out.require(report.leaves == want, "audit leaf count mismatch");
    }
  }
  out.detail = "exact ceil(n/capacity) for all n <= 10^4, capacities {4,10,64}";
  return out;
}

// ---- criterion 4: external selection vs sort oracle ----

Outcome criterion_external_selection() {
  Outcome out;
  ScratchSpace space(wpath("select.scratch"), 2, 4096, 32);
  const std::uint64_t n = 100000;
  ExternalRun run = space.allocate_run(n);
  std::vector<double> vals;
  vals.reserve(n);
  {
    ScratchSpace::Writer w(space, run);
    Rng rng(4004);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = std::floor(rng.next_double() * 5000.0);  // duplicates on purpose
      vals.push_back(v);
      w.append(std::vector<double>{v, rng.next_double()}, i);
    }
  }
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());

  VamSplitParams params;
  params.memory_budget = 1 << 20;  // 1 MiB: the 2.4 MB run forces external passes
  params.sample_size = 1024;
  Rng rng(4005);
  int checked = 0;
  for (int t = 0; t < 20; ++t) {
    const std::uint64_t rank = 1 + rng.next_below(n);
    const double got = external_select(run, 0, rank, params, rng);
    if (got != sorted[rank - 1]) {
      out.require(false, "rank " + std::to_string(rank) + " mismatch");
      break;
    }
    ++checked;
  }
  out.detail = std::to_string(checked) + "/20 ranks exact on 10^5 records, memory budget 1 MiB";
  return out;
}

// ---- criterion 5: bulk-loaded vs insert-built page reads ----

Outcome criterion_bulk_vs_insert() {
  Outcome out;
  Rng rng(5005);
  const std::size_t n = 10000;
  auto pts = clustered_points(n, 2, rng);

  const std::string bulk_path = wpath("bulk.rt"), ins_path = wpath("insert.rt");
  VamSplitParams vparams;
  vparams.leaf_capacity = rtree_page_fanout(4096, 2);  // fill pages like the insert tree's bound
  vamsplit_build(pts, bulk_path, vparams);
  {
    RTree tree = RTree::create(ins_path, 2, RTreeOptions{});
    for (std::size_t i = 0; i < n; ++i) tree.insert(Mbb::point(pts[i]), i);
    tree.flush();
  }

  RTree bulk = RTree::open(bulk_path, 16);
  RTree ins = RTree::open(ins_path, 16);

  std::vector<std::uint64_t> bulk_reads, ins_reads;
  for (int trial = 0; trial < 100; ++trial) {
    Point lo{1000.0 * rng.next_double(), 1000.0 * rng.next_double()};
    Mbb window(lo, {lo[0] + 60.0, lo[1] + 60.0});

    bulk.drop_cache();
    bulk.reset_io();
    auto rb = bulk.range_query(window);
    bulk_reads.push_back(bulk.io().reads);

    ins.drop_cache();
    ins.reset_io();
    auto ri = ins.range_query(window);
    ins_reads.push_back(ins.io().reads);

    std::vector<std::uint64_t> ri64(ri.begin(), ri.end());
    out.require(rb == ri64, "bulk and insert trees disagree on a window");
  }
  auto median = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const std::uint64_t mb = median(bulk_reads), mi = median(ins_reads);
  out.require(mb <= mi, "bulk median reads exceed insert-built");
  out.detail = "median page reads over 100 windows: bulk=" + std::to_string(mb) +
               " insert=" + std::to_string(mi);
  return out;
}

// ---- criterion 6: partition cache efficacy ----

Outcome criterion_cache_efficacy() {
  Outcome out;
  const std::uint64_t n = 50000;
  double pivot;
  {
    std::vector<double> vals;
    Rng rng(6006);
    for (std::uint64_t i = 0; i < n; ++i) vals.push_back(rng.next_double());
    std::nth_element(vals.begin(), vals.begin() + std::ptrdiff_t(n / 2 - 1), vals.end());
    pivot = vals[n / 2 - 1];
  }
  auto partition_writes = [&](std::size_t cache_pages, std::vector<std::uint64_t>& left_ids) {
    ScratchSpace space(wpath("cache_" + std::to_string(cache_pages) + ".scratch"), 1, 4096, cache_pages);
    ExternalRun run = space.allocate_run(n);
    {
      ScratchSpace::Writer w(space, run);
      Rng rng(6006);
      for (std::uint64_t i = 0; i < n; ++i) w.append(std::vector<double>{rng.next_double()}, i);
    }
    space.reset_io();
    auto [left, right] = partition_run(run, 0, pivot, n / 2);
    left_ids.clear();
    std::vector<double> c(1);
    std::uint64_t id = 0;
    for (std::uint64_t i = 0; i < left.count(); ++i) {
      left.read_record(i, c, id);
      left_ids.push_back(id);
    }
    return space.io().writes;
  };
  std::vector<std::uint64_t> ids1, ids64;
  const std::uint64_t writes1 = partition_writes(1, ids1);
  const std::uint64_t writes64 = partition_writes(64, ids64);
  out.require(ids1 == ids64, "cache size changed the partition output");
  out.require(writes64 < writes1, "64-page cache not strictly fewer writes");
  out.detail = "physical writes: cache_pages=1 -> " + std::to_string(writes1) +
               ", cache_pages=64 -> " + std::to_string(writes64);
  return out;
}

// ---- criterion 7: BIRCH exactness and linear scaling ----

Outcome criterion_birch() {
  Outcome out;

  // Root CF vs direct CF on 10^5 points.
  {
    Rng rng(7007);
    CfTree tree(BirchParams{16, 0.05});
    ClusteringFeature direct;
    for (int i = 0; i < 100000; ++i) {
      Point p{rng.next_gaussian(), rng.next_gaussian()};
      tree.insert(p);
      direct = cf_merge(direct, ClusteringFeature::from_point(p));
    }
    const ClusteringFeature root = tree.root_cf();
    out.require(root.n == direct.n, "root CF count");
    for (int d = 0; d < 2; ++d) {
      const double denom = std::max(1.0, std::abs(direct.ls[d]));
      out.require(std::abs(root.ls[d] - direct.ls[d]) / denom < 1e-6, "root CF linear sum");
    }
    out.require(std::abs(root.ss - direct.ss) / direct.ss < 1e-6, "root CF square sum");
  }

  // Wall-time linearity across 10^4, 10^5, 10^6. Rounds are interleaved
  // across sizes and the best of five is kept per size, so load jitter
  // hits every size alike.
  std::vector<std::size_t> sizes{10000, 100000, 1000000};
  std::vector<std::vector<Point>> datasets;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    Rng rng(7100 + s);
    std::vector<Point> pts(sizes[s], Point(2));
    for (auto& p : pts) {
      p[0] = rng.next_gaussian();
      p[1] = rng.next_gaussian();
    }
    datasets.push_back(std::move(pts));
  }
  std::vector<double> per_point(sizes.size(), 1e300);
  for (int rep = 0; rep < 5; ++rep) {
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      CfTree tree(BirchParams{16, 0.05});
      const double ms = elapsed_ms([&] {
        for (const Point& p : datasets[s]) tree.insert(p);
      });
      per_point[s] = std::min(per_point[s], ms / double(sizes[s]));
    }
  }
  const double base = per_point.back();
  std::string rates;
  bool linear = true;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    rates += (s ? ", " : "") + std::to_string(per_point[s] * 1e6) + " ns/pt";
    if (std::abs(per_point[s] - base) > 0.25 * base) linear = false;
  }
  out.require(linear, "per-point time deviates more than 25% across sizes (" + rates + ")");
  out.detail = "root CF exact to 1e-6 on 10^5; per-point insert time [" + rates + "]";
  return out;
}

// ---- criterion 8: CLIQUE correctness and scaling ----

Outcome criterion_clique() {
  Outcome out;

  // Brute-force equality for k <= 4, xi <= 10, N <= 10^4.
  {
    Rng rng(8008);
    for (std::size_t dims : {2, 3, 4}) {
      std::vector<Point> data;
      for (int i = 0; i < 8000; ++i) {
        Point p(dims);
        for (auto& c : p) c = rng.next_double();
        data.push_back(std::move(p));
      }
      for (int i = 0; i < 2000; ++i) {
        Point p(dims);
        for (std::size_t d = 0; d < dims; ++d) p[d] = d < 2 ? 0.2 + 0.08 * rng.next_double() : rng.next_double();
        data.push_back(std::move(p));
      }
      const CliqueParams params{10, 0.025};
      auto got = clique_dense_units(data, params);

      const GridBounds grid = GridBounds::fit(data, params.xi);
      std::map<std::vector<std::size_t>, std::set<std::vector<int>>> want;
      for (std::size_t mask = 1; mask < (std::size_t(1) << dims); ++mask) {
        std::vector<std::size_t> sub;
        for (std::size_t d = 0; d < dims; ++d)
          if (mask & (std::size_t(1) << d)) sub.push_back(d);
        std::map<std::vector<int>, std::uint64_t> counts;
        std::vector<int> key(sub.size());
        for (const Point& p : data) {
          for (std::size_t j = 0; j < sub.size(); ++j) key[j] = grid.cell_of(p[sub[j]], sub[j]);
          ++counts[key];
        }
        std::set<std::vector<int>> dense;
        for (const auto& [cells, count] : counts)
          if (double(count) > params.tau * double(data.size())) dense.insert(cells);
        if (!dense.empty()) want[sub] = std::move(dense);
      }
      out.require(got.size() == want.size(), "subspace count mismatch vs brute force");
      for (const auto& s : got) {
        std::set<std::vector<int>> cells;
        for (const auto& u : s.units) cells.insert(u.cells);
        auto it = want.find(s.dims);
        out.require(it != want.end() && it->second == cells, "dense units differ from brute force");
      }
    }
  }

  // Planted 2-d subspace cluster in 5-d noise.
  {
    Rng rng(8009);
    std::vector<Point> data;
    const std::size_t n = 10000, planted = 1200;
    for (std::size_t i = 0; i < n - planted; ++i) {
      Point p(5);
      for (auto& c : p) c = rng.next_double();
      data.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < planted; ++i) {
      Point p(5);
      for (auto& c : p) c = rng.next_double();
      p[1] = 0.31 + 0.07 * rng.next_double();
      p[3] = 0.62 + 0.07 * rng.next_double();
      data.push_back(std::move(p));
    }
    auto result = clique_dense_units(data, CliqueParams{10, 0.03});
    bool found = false;
    std::size_t max_dims = 0;
    for (const auto& s : result) {
      max_dims = std::max(max_dims, s.dims.size());
      if (s.dims == std::vector<std::size_t>{1, 3}) found = true;
    }
    out.require(found, "planted {1,3} subspace not recovered");
    out.require(max_dims == 2, "spurious higher-dimensional dense subspace");
  }

  // Wall-time linearity in N at fixed xi and dimensionality; interleaved
  // rounds, best of five per size.
  {
    std::vector<std::size_t> sizes{200000, 400000, 800000};
    std::vector<std::vector<Point>> datasets;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      Rng rng(8100 + s);
      std::vector<Point> data(sizes[s], Point(5));
      for (auto& p : data)
        for (auto& c : p) c = rng.next_double();
      datasets.push_back(std::move(data));
    }
    std::vector<double> per_point(sizes.size(), 1e300);
    for (int rep = 0; rep < 5; ++rep) {
      for (std::size_t s = 0; s < sizes.size(); ++s) {
        const double ms = elapsed_ms([&] { clique_dense_units(datasets[s], CliqueParams{10, 0.02}); });
        per_point[s] = std::min(per_point[s], ms / double(sizes[s]));
      }
    }
    const double base = per_point.back();
    bool linear = true;
    std::string rates;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      rates += (s ? ", " : "") + std::to_string(per_point[s] * 1e6) + " ns/pt";
      if (std::abs(per_point[s] - base) > 0.25 * base) linear = false;
    }
    out.require(linear, "per-point time deviates more than 25% (" + rates + ")");
    if (out.pass) out.detail = "brute-force equality (k<=4), planted subspace recovered; [" + rates + "]";
  }
  return out;
}

// ---- criterion 9: CURE arcs and alpha=1 ----

Outcome criterion_cure() {
  Outcome out;
  // Two non-convex interlocking arcs.
  Rng rng(9009);
  std::vector<Point> pts;
  std::vector<int> truth;
  for (int i = 0; i < 500; ++i) {
    const double t = std::numbers::pi * rng.next_double();
    pts.push_back({std::cos(t) + 0.02 * rng.next_gaussian(), std::sin(t) + 0.02 * rng.next_gaussian()});
    truth.push_back(0);
  }
  for (int i = 0; i < 500; ++i) {
    const double t = std::numbers::pi * rng.next_double();
    pts.push_back({1.0 - std::cos(t) + 0.02 * rng.next_gaussian(),
                   0.5 - std::sin(t) + 0.02 * rng.next_gaussian()});
    truth.push_back(1);
  }
  auto clusters = cure_cluster(pts, CureParams{2, 10, 0.3});
  auto labels = cure_label(pts, clusters);
  std::size_t agree01 = 0, agree10 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    agree01 += labels[i] == truth[i];
    agree10 += labels[i] == 1 - truth[i];
  }
  const double best = double(std::max(agree01, agree10)) / double(pts.size());
  out.require(best >= 0.95, "arc agreement " + std::to_string(best));

  // alpha = 1: every representative equals the centroid exactly.
  auto collapsed = cure_cluster(pts, CureParams{2, 10, 1.0});
  for (const auto& cl : collapsed)
    for (const Point& rep : cl.representatives)
      out.require(rep == cl.centroid, "alpha=1 representative differs from centroid");
  if (out.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f%% planted-label agreement, alpha=1 collapse exact", 100.0 * best);
    out.detail = buf;
  }
  return out;
}

// ---- criterion 10: SVC invariants and planted outliers ----

Outcome criterion_svc() {
  Outcome out;
  Rng rng(10010);

  // Invariants on several trained models.
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Point> pts;
    const std::size_t n = 30 + 10 * trial;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({rng.next_gaussian(), rng.next_gaussian()});
    const double C = 1.0 / double(3 + trial);
    SvcModel model = svc_train(pts, SvcParams{.q = 0.7, .C = C});
    double sum = 0.0;
    for (double b : model.beta) sum += b;
    out.require(std::abs(sum - 1.0) <= 1e-9, "sum beta != 1");
    out.require(double(model.bounded_count()) <= 1.0 / C, "too many bounded SVs");
  }

  // Gradient check at 1e-5 relative on random 10-point problems.
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({rng.next_gaussian(), rng.next_gaussian()});
    std::vector<double> beta(10);
    double sum = 0.0;
    for (double& b : beta) {
      b = rng.next_double();
      sum += b;
    }
    for (double& b : beta) b /= sum;
    const double q = 0.6;
    auto objective = [&](const std::vector<double>& bb) {
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        lin += bb[i];
        for (std::size_t j = 0; j < pts.size(); ++j) {
          double s2 = 0.0;
          for (int d = 0; d < 2; ++d) s2 += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
          quad += bb[i] * bb[j] * std::exp(-q * s2);
        }
      }
      return lin - quad;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double kb = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        double s2 = 0.0;
        for (int d = 0; d < 2; ++d) s2 += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
        kb += std::exp(-q * s2) * beta[j];
      }
      const double analytic = 1.0 - 2.0 * kb;
      const double h = 1e-6;
      std::vector<double> up = beta, dn = beta;
      up[i] += h;
      dn[i] -= h;
      const double numeric = (objective(up) - objective(dn)) / (2.0 * h);
      out.require(std::abs(numeric - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)),
                  "gradient check failed");
    }
  }

  // Planted blob + 3 far outliers at C = 1/10: all three classified BSV.
  {
    std::vector<Point> pts;
    Rng blob_rng(10011);
    for (int i = 0; i < 50; ++i)
      pts.push_back({0.3 * blob_rng.next_gaussian(), 0.3 * blob_rng.next_gaussian()});
    pts.push_back({10.0, 0.0});
    pts.push_back({0.0, -11.0});
    pts.push_back({-12.0, 5.0});
    SvcModel model = svc_train(pts, SvcParams{.q = 1.0, .C = 0.1});
    for (std::size_t i : {std::size_t(50), std::size_t(51), std::size_t(52)})
      out.require(model.classes[i] == SvcPointClass::bounded,
                  "outlier " + std::to_string(i) + " not BSV");
    out.require(double(model.bounded_count()) <= 10.0, "BSV bound violated");
  }
  out.detail = "sum(beta)=1 +/- 1e-9, #BSV <= 1/C, gradient 1e-5, 3/3 planted outliers BSV";
  return out;
}

// ---- criterion 11: determinism of the full pipeline ----

Outcome criterion_determinism() {
  Outcome out;
  auto pipeline = [&](const std::string& tag) {
    // gen -> parse -> store -> bulk index -> queries, all seeded.
    Rng rng(42);
    std::ostringstream csv;
    csv << "ra,dec,mag\n";
    char buf[96];
    for (int i = 0; i < 3000; ++i) {
      const double z = 2.0 * rng.next_double() - 1.0;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", 360.0 * rng.next_double(),
                    rad_to_deg(std::asin(z)), 10.0 + 10.0 * rng.next_double());
      csv << buf;
    }
    CatalogSchema schema({ColumnMeta{"ra", SemanticKind::angle, "deg", Dtype::f64},
                          ColumnMeta{"dec", SemanticKind::angle, "deg", Dtype::f64},
                          ColumnMeta{"mag", SemanticKind::magnitude, "mag", Dtype::f64}},
                         "ra", "dec");
    auto records = parse_catalog(csv.str(), schema);
    const std::string store_path = wpath(tag + ".skyf");
    write_store(records, schema, store_path);
    RecordStore store = read_store(store_path);

    auto ra = store.numeric_column("ra");
    auto dec = store.numeric_column("dec");
    std::vector<Point> pts(store.record_count(), Point(3));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec3 v = SphericalPoint{ra[i], dec[i]}.unit_vector();
      pts[i] = {v.x, v.y, v.z};
    }
    const std::string rt_path = wpath(tag + ".rt");
    VamSplitParams params;
    params.seed = 42;
    params.leaf_capacity = 32;
    vamsplit_build(pts, rt_path, params);

    RTree tree = RTree::open(rt_path);
    std::ostringstream results;
    for (int t = 0; t < 20; ++t) {
      auto nn = tree.knn(pts[t * 100], 5);
      for (auto& [id, d] : nn) {
        std::snprintf(buf, sizeof buf, "%llu:%.17g ", (unsigned long long)id, d);
        results << buf;
      }
      results << "\n";
    }
    return std::tuple{csv.str(), file_bytes(store_path), file_bytes(rt_path), results.str()};
  };
  auto [csv1, store1, rt1, res1] = pipeline("deter1");
  auto [csv2, store2, rt2, res2] = pipeline("deter2");
  out.require(csv1 == csv2, "generated CSVs differ");
  out.require(store1 == store2, "store files differ");
  out.require(rt1 == rt2, "index files differ");
  out.require(res1 == res2, "query outputs differ");
  out.detail = "two seeded runs: store, index and query outputs byte-identical";
  return out;
}

// ---- criterion 12: OLAP roll-up consistency ----

Outcome criterion_olap() {
  Outcome out;
  std::vector<std::vector<std::string>> rows;
  for (int y : {2001, 2002, 2003})
    for (int m = 1; m <= 4; ++m)
      for (int d = 1; d <= 5; ++d) {
        const std::string ys = std::to_string(y);
        const std::string ms = ys + "-" + std::to_string(m);
        rows.push_back({ys, ms, ms + "-" + std::to_string(d)});
      }
  DimensionHierarchy dim("day", {"year", "month", "day"}, rows);
  StarSchema schema;
  schema.fact_name = "events";
  schema.dimensions = {dim};

  FactTable fact;
  fact.columns = {"day", "energy"};
  Rng rng(12012);
  for (int i = 0; i < 5000; ++i) {
    const auto& leaf = rows[rng.next_below(rows.size())][2];
    fact.rows.push_back({leaf, "1.0"});
  }

  auto by_day = aggregate(fact, schema, OlapQuery{{"day"}, "", Aggregate::count});
  auto by_month = aggregate(fact, schema, OlapQuery{{"month"}, "", Aggregate::count});
  auto by_year = aggregate(fact, schema, OlapQuery{{"year"}, "", Aggregate::count});

  std::map<std::string, double> month_from_days, year_from_months;
  for (const OlapRow& r : by_day.rows) {
    const std::string& day = r.key[0];
    month_from_days[day.substr(0, day.rfind('-'))] += r.value;
  }
  for (const OlapRow& r : by_month.rows) {
    out.require(r.value == month_from_days.at(r.key[0]), "day->month counts disagree");
    year_from_months[r.key[0].substr(0, 4)] += r.value;
  }
  for (const OlapRow& r : by_year.rows)
    out.require(r.value == year_from_months.at(r.key[0]), "month->year counts disagree");

  double total = 0.0;
  for (const OlapRow& r : by_year.rows) total += r.value;
  out.require(total == double(fact.rows.size()), "counts do not partition the fact rows");
  out.detail = "child-level counts sum exactly to parents over a 3-level hierarchy";
  return out;
}

}  // namespace

int main() {
  g_workdir = std::filesystem::temp_directory_path() / "sky_acceptance";
  std::filesystem::remove_all(g_workdir);
  std::filesystem::create_directories(g_workdir);

  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence (point/range/knn/join vs linear scans)", criterion_oracles},
      {2, "HTM tiling, locate verification, level-5 trixel count", criterion_htm},
      {3, "VAMSplit bucket minimality", criterion_bucket_minimality},
      {4, "external selection equals sort-based selection", criterion_external_selection},
      {5, "bulk-loaded vs insert-built page reads", criterion_bulk_vs_insert},
      {6, "partition cache efficacy", criterion_cache_efficacy},
      {7, "BIRCH CF exactness and linear scaling", criterion_birch},
      {8, "CLIQUE brute-force equality, planted subspace, linear scaling", criterion_clique},
      {9, "CURE non-convex arcs and alpha=1 collapse", criterion_cure},
      {10, "SVC invariants, gradient check, planted outliers", criterion_svc},
      {11, "pipeline determinism under seed 42", criterion_determinism},
      {12, "OLAP roll-up consistency", criterion_olap},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    double ms = 0.0;
    try {
      ms = elapsed_ms([&] { outcome = c.fn(); });
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s (%.0f ms)%s%s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.title,
                ms, outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::filesystem::remove_all(g_workdir);
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
