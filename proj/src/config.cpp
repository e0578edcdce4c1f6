#include "sky/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sky/csv.hpp"
#include "sky/error.hpp"

namespace sky {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<KvPair> parse_kv(std::string_view text) {
  std::vector<KvPair> out;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(Errc::bad_config, "line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string_view s) {
      const std::size_t b = s.find_first_not_of(" \t\r");
      const std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
    };
    out.push_back(KvPair{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }
  return out;
}

namespace {

template <typename T>
T parse_number(const KvPair& kv) {
  T v{};
  auto [p, ec] = std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), v);
  if (ec != std::errc() || p != kv.value.data() + kv.value.size())
    fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": bad value '" + kv.value + "' for " + kv.key);
  return v;
}

void check(bool ok, const KvPair& kv, const char* what) {
  if (!ok) fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": " + kv.key + " " + what);
}

}  // namespace

RunConfig RunConfig::from_text(std::string_view text) {
  RunConfig cfg;
  for (const KvPair& kv : parse_kv(text)) {
    if (kv.key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(kv);
    } else if (kv.key == "page_size") {
      cfg.page_size = parse_number<std::uint32_t>(kv);
      check(cfg.page_size >= 64, kv, "must be at least 64");
    } else if (kv.key == "cache_pages") {
      cfg.cache_pages = parse_number<std::size_t>(kv);
      check(cfg.cache_pages >= 1, kv, "must be at least 1");
    } else if (kv.key == "leaf_capacity") {
      cfg.leaf_capacity = parse_number<std::size_t>(kv);
      check(cfg.leaf_capacity >= 2, kv, "must be at least 2");
    } else if (kv.key == "sample_size") {
      cfg.sample_size = parse_number<std::size_t>(kv);
      check(cfg.sample_size >= 1, kv, "must be at least 1");
    } else if (kv.key == "memory_budget") {
      cfg.memory_budget = parse_number<std::size_t>(kv);
      check(cfg.memory_budget >= 4096, kv, "must be at least one page");
    } else if (kv.key == "kd_leaf_points") {
      cfg.kd_leaf_points = parse_number<std::size_t>(kv);
      check(cfg.kd_leaf_points >= 1, kv, "must be at least 1");
    } else if (kv.key == "htm_level") {
      cfg.htm_level = parse_number<int>(kv);
      check(cfg.htm_level >= 0 && cfg.htm_level <= 20, kv, "must be in [0, 20]");
    } else if (kv.key == "birch_branching") {
      cfg.birch_branching = parse_number<std::size_t>(kv);
      check(cfg.birch_branching >= 2, kv, "must be at least 2");
    } else if (kv.key == "birch_threshold") {
      cfg.birch_threshold = parse_number<double>(kv);
      check(cfg.birch_threshold >= 0.0, kv, "must be non-negative");
    } else if (kv.key == "cluster_k") {
      cfg.cluster_k = parse_number<std::size_t>(kv);
      check(cfg.cluster_k >= 1, kv, "must be at least 1");
    } else if (kv.key == "cure_representatives") {
      cfg.cure_representatives = parse_number<std::size_t>(kv);
      check(cfg.cure_representatives >= 1, kv, "must be at least 1");
    } else if (kv.key == "cure_alpha") {
      cfg.cure_alpha = parse_number<double>(kv);
      check(cfg.cure_alpha >= 0.0 && cfg.cure_alpha <= 1.0, kv, "must be in [0, 1]");
    } else if (kv.key == "cure_sample") {
      cfg.cure_sample = parse_number<std::size_t>(kv);
      check(cfg.cure_sample >= 1, kv, "must be at least 1");
    } else if (kv.key == "clique_xi") {
      cfg.clique_xi = parse_number<int>(kv);
      check(cfg.clique_xi >= 1, kv, "must be at least 1");
    } else if (kv.key == "clique_tau") {
      cfg.clique_tau = parse_number<double>(kv);
      check(cfg.clique_tau > 0.0 && cfg.clique_tau < 1.0, kv, "must be in (0, 1)");
    } else if (kv.key == "svc_q") {
      cfg.svc_q = parse_number<double>(kv);
      check(cfg.svc_q > 0.0, kv, "must be positive");
    } else if (kv.key == "svc_c") {
      cfg.svc_c = parse_number<double>(kv);
      check(cfg.svc_c > 0.0, kv, "must be positive");
    } else if (kv.key == "svc_tolerance") {
      cfg.svc_tolerance = parse_number<double>(kv);
      check(cfg.svc_tolerance > 0.0, kv, "must be positive");
    } else if (kv.key == "svc_segment_samples") {
      cfg.svc_segment_samples = parse_number<int>(kv);
      check(cfg.svc_segment_samples >= 1, kv, "must be at least 1");
    } else {
      fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": unknown key '" + kv.key + "'");
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) { return from_text(read_text_file(path)); }

CatalogSchema schema_from_text(std::string_view text) {
  std::vector<ColumnMeta> columns;
  std::string ra, dec;
  for (const KvPair& kv : parse_kv(text)) {
    if (kv.key == "column") {
      auto fields = split_csv_line(kv.value);
      if (fields.size() != 4)
        fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": column=name,kind,unit,dtype");
      columns.push_back(ColumnMeta{fields[0], parse_semantic_kind(fields[1]), fields[2], parse_dtype(fields[3])});
    } else if (kv.key == "position") {
      auto fields = split_csv_line(kv.value);
      if (fields.size() != 2)
        fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": position=ra_col,dec_col");
      ra = fields[0];
      dec = fields[1];
    } else {
      fail(Errc::bad_config, "line " + std::to_string(kv.line_no) + ": unknown key '" + kv.key + "'");
    }
  }
  if (columns.empty()) fail(Errc::bad_config, "schema has no columns");
  if (ra.empty()) fail(Errc::bad_config, "schema has no position= line");
  return CatalogSchema(std::move(columns), ra, dec);
}

CatalogSchema schema_from_file(const std::string& path) { return schema_from_text(read_text_file(path)); }

}  // namespace sky
