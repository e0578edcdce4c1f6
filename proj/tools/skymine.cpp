// skymine: catalog ingestion, spatial index building, queries,
// cross-matching, OLAP and clustering over .skyf stores.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sky/birch.hpp"
#include "sky/bulkload.hpp"
#include "sky/catalog.hpp"
#include "sky/clique.hpp"
#include "sky/config.hpp"
#include "sky/csv.hpp"
#include "sky/cure.hpp"
#include "sky/error.hpp"
#include "sky/geom.hpp"
#include "sky/htm.hpp"
#include "sky/kdtree.hpp"
#include "sky/random.hpp"
#include "sky/rtree.hpp"
#include "sky/svc.hpp"
#include "sky/warehouse.hpp"

namespace {

using namespace sky;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& csv) { return split_csv_line(csv); }

std::vector<double> parse_point(const std::string& csv) {
  std::vector<double> out;
  for (const auto& f : split_csv_line(csv)) out.push_back(std::stod(f));
  return out;
}

void print_stats(const IoCounter& io) {
  std::cerr << "reads=" << io.reads << " writes=" << io.writes << "\n";
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(Errc::io_error, "cannot open '" + path + "' for writing");
  return file;
}

// Row-major feature matrix from the named numeric columns.
std::vector<Point> store_points(const RecordStore& store, const std::vector<std::string>& dims) {
  std::vector<std::vector<double>> cols;
  for (const auto& d : dims) cols.push_back(store.numeric_column(d));
  std::vector<Point> pts(store.record_count(), Point(dims.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t d = 0; d < cols.size(); ++d) pts[i][d] = cols[d][i];
  return pts;
}

// 3-d unit vectors from the store's position columns.
std::vector<Point> store_unit_vectors(const RecordStore& store) {
  auto ra = store.numeric_column(store.schema().ra_column());
  auto dec = store.numeric_column(store.schema().dec_column());
  std::vector<Point> pts(store.record_count(), Point(3));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3 v = SphericalPoint{ra[i], dec[i]}.unit_vector();
    pts[i] = {v.x, v.y, v.z};
  }
  return pts;
}

struct GenSpec {
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  std::string dist = "uniform_sphere";  // or "blobs"
  std::size_t blobs = 3;
  double sigma_deg = 2.0;
  double mag_min = 10.0, mag_max = 20.0;
};

GenSpec parse_genspec(const std::string& path) {
  GenSpec g;
  for (const KvPair& kv : parse_kv(read_text_file(path))) {
    if (kv.key == "n")
      g.n = std::stoull(kv.value);
    else if (kv.key == "seed")
      g.seed = std::stoull(kv.value);
    else if (kv.key == "dist")
      g.dist = kv.value;
    else if (kv.key == "blobs")
      g.blobs = std::stoull(kv.value);
    else if (kv.key == "sigma_deg")
      g.sigma_deg = std::stod(kv.value);
    else if (kv.key == "mag_min")
      g.mag_min = std::stod(kv.value);
    else if (kv.key == "mag_max")
      g.mag_max = std::stod(kv.value);
    else
      fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": unknown key '" + kv.key + "'");
  }
  if (g.dist != "uniform_sphere" && g.dist != "blobs")
    fail(Errc::bad_config, "dist must be uniform_sphere or blobs");
  return g;
}

void run_gen(const GenSpec& g, std::ostream& out) {
  Rng rng(g.seed);
  out << "ra,dec,mag\n";
  std::vector<SphericalPoint> centers;
  if (g.dist == "blobs") {
    for (std::size_t b = 0; b < g.blobs; ++b) {
      const double z = 2.0 * rng.next_double() - 1.0;
      centers.push_back(SphericalPoint{360.0 * rng.next_double(), rad_to_deg(std::asin(z))});
    }
  }
  for (std::size_t i = 0; i < g.n; ++i) {
    SphericalPoint p;
    if (g.dist == "uniform_sphere") {
      const double z = 2.0 * rng.next_double() - 1.0;
      p = SphericalPoint{360.0 * rng.next_double(), rad_to_deg(std::asin(z))};
    } else {
      const SphericalPoint& c = centers[i % centers.size()];
      // Tangent-plane Gaussian scatter around the blob center.
      const double dra = rng.next_gaussian() * g.sigma_deg;
      const double ddec = rng.next_gaussian() * g.sigma_deg;
      double dec = std::clamp(c.dec + ddec, -90.0, 90.0);
      double ra = std::fmod(c.ra + dra, 360.0);
      if (ra < 0) ra += 360.0;
      p = SphericalPoint{ra, dec};
    }
    const double mag = g.mag_min + (g.mag_max - g.mag_min) * rng.next_double();
    out << fmt_double(p.ra) << "," << fmt_double(p.dec) << "," << fmt_double(mag) << "\n";
  }
}

VamSplitParams bulk_params_from(const RunConfig& cfg) {
  VamSplitParams p;
  p.leaf_capacity = cfg.leaf_capacity;
  p.sample_size = cfg.sample_size;
  p.cache_pages = cfg.cache_pages;
  p.memory_budget = cfg.memory_budget;
  p.seed = cfg.seed;
  p.page_size = cfg.page_size;
  return p;
}

int run(int argc, char** argv) {
  CLI::App app{"catalog indexing and mining tool"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (key=value)");

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "parse a CSV catalog into a .skyf store");
  std::string in_csv, in_schema, ingest_out;
  ingest->add_option("csv", in_csv, "input CSV")->required();
  ingest->add_option("schema", in_schema, "schema file")->required();
  ingest->add_option("-o,--output", ingest_out, ".skyf output")->required();

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a synthetic catalog CSV");
  std::string gen_spec, gen_out;
  gen->add_option("spec", gen_spec, "generator spec file")->required();
  gen->add_option("-o,--output", gen_out, "output CSV (default stdout)");

  // ---- build ----
  auto* build = app.add_subcommand("build", "build an index from a store");
  std::string build_index, build_store, build_out, build_dims;
  bool build_sphere = false, build_stats = false, build_report = false;
  build->add_option("--index", build_index, "htm | kdtree | rtree-bulk | rtree-insert")
      ->required()
      ->check(CLI::IsMember({"htm", "kdtree", "rtree-bulk", "rtree-insert"}));
  build->add_option("store", build_store, ".skyf store")->required();
  build->add_option("-o,--output", build_out, "output file");
  build->add_option("--dims", build_dims, "comma-separated key columns");
  build->add_flag("--sphere", build_sphere, "index 3-d unit vectors of the position columns");
  build->add_flag("--stats", build_stats, "print I/O counters to stderr");
  build->add_flag("--report", build_report, "print per-split build report to stderr");
  int build_level = -1;
  build->add_option("--level", build_level, "HTM level (default from config)");

  // ---- query ----
  auto* query = app.add_subcommand("query", "query an index");
  std::string query_kind, query_index, query_at, query_low, query_high, query_engine = "rtree",
                                                                        query_dims;
  std::size_t query_k = 1;
  bool query_stats = false;
  query->add_option("kind", query_kind, "point | range | knn")
      ->required()
      ->check(CLI::IsMember({"point", "range", "knn"}));
  query->add_option("index", query_index, ".rt file (or .skyf with --engine kdtree)")->required();
  query->add_option("--at", query_at, "query point x,y[,z]");
  query->add_option("--low", query_low, "window low corner");
  query->add_option("--high", query_high, "window high corner");
  query->add_option("--k", query_k, "neighbors")->check(CLI::PositiveNumber);
  query->add_option("--engine", query_engine, "rtree | kdtree")
      ->check(CLI::IsMember({"rtree", "kdtree"}));
  query->add_option("--dims", query_dims, "key columns for --engine kdtree");
  query->add_flag("--stats", query_stats, "print I/O counters to stderr");

  // ---- crossmatch ----
  auto* cross = app.add_subcommand("crossmatch", "spatial join of two spherical R-trees");
  std::string cross_a, cross_b;
  double cross_radius = 0.0;
  bool cross_stats = false;
  cross->add_option("indexA", cross_a)->required();
  cross->add_option("indexB", cross_b)->required();
  cross->add_option("--radius-deg", cross_radius, "match radius in degrees")->required();
  cross->add_flag("--stats", cross_stats, "print I/O counters to stderr");

  // ---- olap ----
  auto* olap = app.add_subcommand("olap", "aggregate a fact table over dimension hierarchies");
  std::string olap_fact, olap_measure, olap_agg = "count";
  std::vector<std::string> olap_dims, olap_groups;
  olap->add_option("fact", olap_fact, "fact CSV")->required();
  olap->add_option("--dim", olap_dims, "hierarchy CSV (leaf,...,root); repeatable")->required();
  olap->add_option("--group", olap_groups, "dimension=level (or =all); repeatable");
  olap->add_option("--agg", olap_agg, "count | sum | mean | min | max");
  olap->add_option("--measure", olap_measure, "measure column");

  // ---- cluster ----
  auto* cluster = app.add_subcommand("cluster", "cluster store records");
  std::string cl_algo, cl_store, cl_dims;
  cluster->add_option("algorithm", cl_algo, "birch | cure | clique")
      ->required()
      ->check(CLI::IsMember({"birch", "cure", "clique"}));
  cluster->add_option("store", cl_store, ".skyf store")->required();
  cluster->add_option("--dims", cl_dims, "feature columns")->required();
  double cl_threshold = -1.0, cl_alpha = -1.0, cl_tau = -1.0;
  std::size_t cl_branching = 0, cl_k = 0, cl_reps = 0, cl_sample = 0;
  int cl_xi = 0;
  std::uint64_t cl_seed = 0;
  cluster->add_option("--threshold", cl_threshold, "birch absorption radius");
  cluster->add_option("--branching", cl_branching, "birch branching factor");
  cluster->add_option("--k", cl_k, "clusters (birch, cure)");
  cluster->add_option("--reps", cl_reps, "cure representatives");
  cluster->add_option("--alpha", cl_alpha, "cure shrink factor");
  cluster->add_option("--sample", cl_sample, "cure sample size");
  cluster->add_option("--seed", cl_seed, "cure sampling seed");
  cluster->add_option("--xi", cl_xi, "clique intervals per dimension");
  cluster->add_option("--tau", cl_tau, "clique density threshold");

  // ---- svc ----
  auto* svc = app.add_subcommand("svc", "support vector novelty detection");
  std::string svc_store, svc_dims;
  double svc_q = -1.0, svc_c = -1.0;
  int svc_m = 0;
  svc->add_option("store", svc_store, ".skyf store")->required();
  svc->add_option("--dims", svc_dims, "feature columns")->required();
  svc->add_option("--q", svc_q, "kernel width");
  svc->add_option("--C", svc_c, "soft-margin bound");
  svc->add_option("--m", svc_m, "segment samples for labeling");

  // Usage errors exit 1; --help exits 0.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  RunConfig cfg;
  if (!config_path.empty()) cfg = RunConfig::from_file(config_path);

  if (*ingest) {
    CatalogSchema schema = schema_from_file(in_schema);
    auto records = parse_catalog(read_text_file(in_csv), schema);
    write_store(records, schema, ingest_out, cfg.page_size);
    std::cerr << "ingested " << records.size() << " records\n";
    return 0;
  }

  if (*gen) {
    GenSpec g = parse_genspec(gen_spec);
    std::ofstream file;
    run_gen(g, open_output(file, gen_out));
    return 0;
  }

  if (*build) {
    RecordStore store = read_store(build_store);
    if (build_level >= 0) cfg.htm_level = build_level;

    if (build_index == "htm") {
      auto ra = store.numeric_column(store.schema().ra_column());
      auto dec = store.numeric_column(store.schema().dec_column());
      std::vector<SphericalPoint> pos(store.record_count());
      for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = {ra[i], dec[i]};
      HtmPartition part = partition(pos, cfg.htm_level);
      std::ofstream file;
      std::ostream& out = open_output(file, build_out);
      out << "trixel_id,record_index\n";
      for (const auto& [trixel, members] : part.buckets)
        for (std::size_t idx : members) out << trixel.to_string() << "," << idx << "\n";
      std::cerr << "htm level " << part.level << ": " << part.buckets.size() << " buckets\n";
      return 0;
    }

    std::vector<Point> pts;
    if (build_sphere)
      pts = store_unit_vectors(store);
    else if (!build_dims.empty())
      pts = store_points(store, split_list(build_dims));
    else
      fail(Errc::bad_config, "build needs --dims or --sphere");

    if (build_index == "kdtree") {
      KdBuildParams params;
      params.leaf_point_threshold = cfg.kd_leaf_points;
      KdTree tree = KdTree::build(pts, params);
      std::cerr << "kdtree: " << tree.size() << " points, in-memory only (not persisted)\n";
      return 0;
    }

    if (build_out.empty()) fail(Errc::bad_config, "build --index rtree-* needs -o");
    if (build_index == "rtree-bulk") {
      VamSplitParams params = bulk_params_from(cfg);
      BuildLog log = vamsplit_build(pts, build_out, params, build_report ? &std::cerr : nullptr);
      if (build_stats) print_stats(log.scratch_io);
      std::cerr << "rtree-bulk: " << log.leaf_pages << " leaves\n";
    } else {
      RTreeOptions opts;
      opts.page_size = cfg.page_size;
      opts.cache_pages = cfg.cache_pages;
      RTree tree = RTree::create(build_out, std::uint16_t(pts[0].size()), opts);
      for (std::size_t i = 0; i < pts.size(); ++i) tree.insert(Mbb::point(pts[i]), i);
      tree.flush();
      if (build_stats) print_stats(tree.io());
      std::cerr << "rtree-insert: " << tree.record_count() << " records, height " << tree.height() << "\n";
    }
    return 0;
  }

  if (*query) {
    if (query_engine == "kdtree") {
      if (query_dims.empty()) fail(Errc::bad_config, "--engine kdtree needs --dims");
      RecordStore store = read_store(query_index);
      KdBuildParams params;
      params.leaf_point_threshold = cfg.kd_leaf_points;
      KdTree tree = KdTree::build(store_points(store, split_list(query_dims)), params);
      if (query_kind == "point") {
        auto p = parse_point(query_at);
        for (std::size_t idx : tree.range_query(KdBox{p, p})) std::cout << idx << "\n";
      } else if (query_kind == "range") {
        for (std::size_t idx : tree.range_query(KdBox{parse_point(query_low), parse_point(query_high)}))
          std::cout << idx << "\n";
      } else {
        for (const Neighbor& nb : tree.knn(parse_point(query_at), query_k))
          std::cout << nb.index << "," << fmt_double(nb.distance) << "\n";
      }
      if (query_stats) print_stats(IoCounter{});  // in-memory: no page I/O
      return 0;
    }

    RTree tree = RTree::open(query_index, cfg.cache_pages);
    tree.reset_io();
    if (query_kind == "point") {
      for (std::uint64_t id : tree.point_query(parse_point(query_at))) std::cout << id << "\n";
    } else if (query_kind == "range") {
      Mbb window(parse_point(query_low), parse_point(query_high));
      for (std::uint64_t id : tree.range_query(window)) std::cout << id << "\n";
    } else {
      for (const auto& [id, dist] : tree.knn(parse_point(query_at), query_k))
        std::cout << id << "," << fmt_double(dist) << "\n";
    }
    if (query_stats) print_stats(tree.io());
    return 0;
  }

  if (*cross) {
    RTree a = RTree::open(cross_a, cfg.cache_pages);
    RTree b = RTree::open(cross_b, cfg.cache_pages);
    if (a.k() != 3 || b.k() != 3)
      fail(Errc::dimension_mismatch, "crossmatch expects 3-d unit-vector indexes (build --sphere)");
    a.reset_io();
    b.reset_io();
    // Angular radius -> chord length on the unit sphere.
    const double eps = 2.0 * std::sin(deg_to_rad(cross_radius) / 2.0);
    auto pairs = RTree::spatial_join(a, b, eps);
    std::cout << "id_a,id_b\n";
    for (const auto& [ia, ib] : pairs) std::cout << ia << "," << ib << "\n";
    if (cross_stats) {
      print_stats(a.io());
      print_stats(b.io());
    }
    return 0;
  }

  if (*olap) {
    FactTable fact = FactTable::from_csv(read_text_file(olap_fact));
    StarSchema schema;
    schema.fact_name = olap_fact;
    for (const auto& path : olap_dims)
      schema.dimensions.push_back(DimensionHierarchy::from_csv(read_text_file(path)));

    OlapQuery q;
    q.group_levels.assign(schema.dimensions.size(), kGroupAll);
    for (const auto& spec : olap_groups) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) fail(Errc::bad_config, "--group expects dimension=level");
      const std::string dim = spec.substr(0, eq), level = spec.substr(eq + 1);
      bool found = false;
      for (std::size_t i = 0; i < schema.dimensions.size(); ++i) {
        if (schema.dimensions[i].name() == dim) {
          q.group_levels[i] = level;
          found = true;
        }
      }
      if (!found) fail(Errc::unknown_dimension, dim);
    }
    q.aggregate = parse_aggregate(olap_agg);
    q.measure = olap_measure;
    if (q.aggregate != Aggregate::count && q.measure.empty())
      fail(Errc::bad_config, "--agg " + olap_agg + " needs --measure");

    OlapResult result = aggregate(fact, schema, q);
    for (std::size_t i = 0; i < result.key_levels.size(); ++i)
      std::cout << result.key_levels[i] << ",";
    std::cout << olap_agg << "\n";
    for (const OlapRow& row : result.rows) {
      for (const auto& part : row.key) std::cout << part << ",";
      std::cout << fmt_double(row.value) << "\n";
    }
    return 0;
  }

  if (*cluster) {
    RecordStore store = read_store(cl_store);
    std::vector<Point> pts = store_points(store, split_list(cl_dims));
    if (cl_k) cfg.cluster_k = cl_k;

    if (cl_algo == "birch") {
      BirchParams params{cl_branching ? cl_branching : cfg.birch_branching,
                         cl_threshold >= 0.0 ? cl_threshold : cfg.birch_threshold};
      CfTree tree(params);
      for (const Point& p : pts) tree.insert(p);
      auto leaves = tree.leaf_entries();
      auto groups = birch_global(leaves, std::min(cfg.cluster_k, leaves.size()));
      // Label records by the nearest final cluster centroid.
      std::vector<Point> centroids;
      for (const auto& g : groups) {
        ClusteringFeature cf;
        for (std::size_t e : g) cf = cf_merge(cf, leaves[e]);
        centroids.push_back(cf.centroid());
      }
      std::cout << "record_index,cluster_id\n";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
          double s = 0.0;
          for (std::size_t d = 0; d < pts[i].size(); ++d) {
            double t = pts[i][d] - centroids[c][d];
            s += t * t;
          }
          if (s < best_d) {
            best_d = s;
            best = c;
          }
        }
        std::cout << i << "," << best << "\n";
      }
      const ClusteringFeature root = tree.root_cf();
      std::cout << "# birch leaves=" << leaves.size() << " clusters=" << groups.size()
                << " n=" << root.n << " radius=" << fmt_double(root.radius()) << "\n";
      return 0;
    }

    if (cl_algo == "cure") {
      CureParams params;
      params.k = cfg.cluster_k;
      params.representatives = cl_reps ? cl_reps : cfg.cure_representatives;
      params.alpha = cl_alpha >= 0.0 ? cl_alpha : cfg.cure_alpha;
      const std::size_t sample_size = std::min(cl_sample ? cl_sample : cfg.cure_sample, pts.size());
      auto sample_idx = draw_sample(pts.size(), sample_size, cluster->count("--seed") ? cl_seed : cfg.seed);
      std::vector<Point> sample;
      sample.reserve(sample_idx.size());
      for (std::size_t i : sample_idx) sample.push_back(pts[i]);
      auto clusters = cure_cluster(sample, params);
      auto labels = cure_label(pts, clusters);
      std::cout << "record_index,cluster_id\n";
      for (std::size_t i = 0; i < labels.size(); ++i) std::cout << i << "," << labels[i] << "\n";
      std::cout << "# cure sample=" << sample.size() << " clusters=" << clusters.size() << "\n";
      return 0;
    }

    // clique
    CliqueParams params;
    params.xi = cl_xi ? cl_xi : cfg.clique_xi;
    params.tau = cl_tau > 0.0 ? cl_tau : cfg.clique_tau;
    auto subspaces = clique_dense_units(pts, params);
    if (subspaces.empty()) {
      std::cout << "record_index,cluster_id\n";
      std::cout << "# clique: no dense units\n";
      return 0;
    }
    // Records are labeled within the first highest-dimensional dense
    // subspace; all region descriptions go to the summary block.
    const std::size_t top_dims = subspaces.back().dims.size();
    const SubspaceUnits* labeling = nullptr;
    for (const auto& s : subspaces)
      if (s.dims.size() == top_dims && !labeling) labeling = &s;

    const GridBounds grid = GridBounds::fit(pts, params.xi);
    auto clusters = clique_identify_clusters(*labeling);
    std::map<std::vector<int>, int> unit_cluster;
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (std::size_t u : clusters[c]) unit_cluster[labeling->units[u].cells] = int(c);

    std::cout << "record_index,cluster_id\n";
    std::vector<int> probe(labeling->dims.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < labeling->dims.size(); ++j)
        probe[j] = grid.cell_of(pts[i][labeling->dims[j]], labeling->dims[j]);
      auto it = unit_cluster.find(probe);
      std::cout << i << "," << (it == unit_cluster.end() ? -1 : it->second) << "\n";
    }
    for (const auto& s : subspaces) {
      if (s.dims.size() != top_dims) continue;
      auto comps = clique_identify_clusters(s);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        auto regions = clique_minimal_description(s, comps[c]);
        std::cout << "# clique subspace=";
        for (std::size_t j = 0; j < s.dims.size(); ++j) std::cout << (j ? "," : "") << s.dims[j];
        std::cout << " cluster=" << c << " regions=";
        for (std::size_t r = 0; r < regions.size(); ++r) {
          std::cout << (r ? ";" : "");
          for (std::size_t j = 0; j < regions[r].size(); ++j)
            std::cout << (j ? "x" : "") << "[" << regions[r][j].first << "," << regions[r][j].second << "]";
        }
        std::cout << "\n";
      }
    }
    return 0;
  }

  if (*svc) {
    RecordStore store = read_store(svc_store);
    std::vector<Point> pts = store_points(store, split_list(svc_dims));
    SvcParams params;
    params.q = svc_q > 0.0 ? svc_q : cfg.svc_q;
    params.C = svc_c > 0.0 ? svc_c : cfg.svc_c;
    params.tolerance = cfg.svc_tolerance;
    params.segment_samples = svc_m > 0 ? svc_m : cfg.svc_segment_samples;
    SvcModel model = svc_train(pts, params);
    auto labels = svc_label_clusters(model, params.segment_samples);
    std::cout << "record_index,cluster_id\n";
    for (std::size_t i = 0; i < labels.size(); ++i) std::cout << i << "," << labels[i] << "\n";
    std::cout << "# svc sv=" << model.support_count() << " bsv=" << model.bounded_count()
              << " r=" << fmt_double(model.radius) << " objective=" << fmt_double(model.dual_objective)
              << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sky::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
