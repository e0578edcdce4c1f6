// Star-schema-lite metadata layer: a fact table joined to dimension
// hierarchies, with roll-up / drill-down aggregation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sky/catalog.hpp"

namespace sky {

// Attribute hierarchy of one dimension. Levels are ordered root (coarsest)
// to leaf (finest); the mapping sends each leaf value to its ancestor chain
// and must form a tree (one parent per value at every level).
class DimensionHierarchy {
 public:
  DimensionHierarchy() = default;
  // rows: one entry per leaf value, each listing values root..leaf
  // (same order as `levels`).
  DimensionHierarchy(std::string dimension_name, std::vector<std::string> levels,
                     std::vector<std::vector<std::string>> rows);

  // Loads from CSV of the form leaf,level1,...,root (finest first).
  static DimensionHierarchy from_csv(std::string_view text);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& levels() const { return levels_; }
  const std::string& root_level() const { return levels_.front(); }
  const std::string& leaf_level() const { return levels_.back(); }

  std::optional<std::size_t> level_index(std::string_view level) const;
  // Value of `leaf` at `level`; unknown_level / unknown leaf value errors.
  const std::string& value_at(const std::string& leaf, std::size_t level_idx) const;
  bool has_leaf(const std::string& leaf) const { return map_.contains(leaf); }

 private:
  std::string name_;
  std::vector<std::string> levels_;                        // root .. leaf
  std::map<std::string, std::vector<std::string>> map_;    // leaf -> root..leaf chain
};

struct FactTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // raw cells; measures parsed on demand

  static FactTable from_csv(std::string_view text);
  std::size_t column_index(std::string_view name) const;
};

struct StarSchema {
  std::string fact_name;
  std::vector<std::string> measures;
  std::vector<DimensionHierarchy> dimensions;

  const DimensionHierarchy& dimension(std::string_view name) const;
};

enum class Aggregate { count, sum, mean, min, max };

Aggregate parse_aggregate(std::string_view s);
const char* aggregate_name(Aggregate a);

// "all" collapses a dimension entirely; it is not part of the hierarchy
// and is not reachable by roll_up from the root.
inline constexpr const char* kGroupAll = "all";

struct OlapQuery {
  std::vector<std::string> group_levels;  // one per schema dimension, or kGroupAll
  std::string measure;
  Aggregate aggregate = Aggregate::count;
};

struct OlapRow {
  std::vector<std::string> key;  // one component per non-"all" dimension
  double value = 0.0;
  std::uint64_t rows = 0;  // fact rows aggregated into this group
};

struct OlapResult {
  std::vector<std::string> key_levels;  // header for the key components
  std::vector<OlapRow> rows;            // sorted by key
};

// Groups fact rows by the chosen level per dimension and aggregates the
// measure. The fact table must hold one column per dimension (named like
// the dimension) carrying leaf values.
OlapResult aggregate(const FactTable& fact, const StarSchema& schema, const OlapQuery& query);

// One step toward the root / the leaf on the named dimension; returns the
// query unchanged at the boundary.
OlapQuery roll_up(const OlapQuery& query, const StarSchema& schema, std::string_view dimension);
OlapQuery drill_down(const OlapQuery& query, const StarSchema& schema, std::string_view dimension);

}  // namespace sky
