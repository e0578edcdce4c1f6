// key=value configuration files: run configuration, catalog schema files
// and synthetic-catalog specs all share the same dialect ('#' comments,
// one pair per line).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sky/catalog.hpp"

namespace sky {

struct KvPair {
  std::string key, value;
  std::size_t line_no = 0;
};

// Preserves order and duplicate keys (schema files repeat `column=`).
std::vector<KvPair> parse_kv(std::string_view text);

// Run-wide knobs. Unknown keys are rejected; every value is range-checked
// at parse time.
struct RunConfig {
  std::uint64_t seed = 42;
  std::uint32_t page_size = 4096;
  std::size_t cache_pages = 64;
  // index
  std::size_t leaf_capacity = 64;
  std::size_t sample_size = 1024;
  std::size_t memory_budget = std::size_t(64) << 20;
  std::size_t kd_leaf_points = 8;
  int htm_level = 5;
  // clustering
  std::size_t birch_branching = 50;
  double birch_threshold = 0.5;
  std::size_t cluster_k = 2;
  std::size_t cure_representatives = 10;
  double cure_alpha = 0.3;
  std::size_t cure_sample = 500;
  int clique_xi = 10;
  double clique_tau = 0.02;
  double svc_q = 1.0;
  double svc_c = 1.0;
  double svc_tolerance = 1e-6;
  int svc_segment_samples = 20;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(std::string_view text);
};

// Schema file: ordered `column=name,kind,unit,dtype` lines plus
// `position=ra_col,dec_col`.
CatalogSchema schema_from_text(std::string_view text);
CatalogSchema schema_from_file(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace sky
