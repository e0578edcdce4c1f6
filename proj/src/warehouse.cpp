#include "sky/warehouse.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "sky/csv.hpp"
#include "sky/error.hpp"

namespace sky {

DimensionHierarchy::DimensionHierarchy(std::string dimension_name, std::vector<std::string> levels,
                                       std::vector<std::vector<std::string>> rows)
    : name_(std::move(dimension_name)), levels_(std::move(levels)) {
  if (levels_.empty()) fail(Errc::bad_config, "dimension '" + name_ + "' has no levels");
  for (const auto& chain : rows) {
    if (chain.size() != levels_.size())
      fail(Errc::bad_config, "hierarchy row arity != level count in '" + name_ + "'");
    const std::string& leaf = chain.back();
    if (auto it = map_.find(leaf); it != map_.end()) {
      if (it->second != chain) fail(Errc::bad_config, "leaf '" + leaf + "' maps to two ancestor chains");
      continue;
    }
    map_[leaf] = chain;
  }
  // Tree property: a value at any level has exactly one parent value.
  for (std::size_t lvl = 1; lvl < levels_.size(); ++lvl) {
    std::map<std::string, std::string> parent_of;
    for (const auto& [leaf, chain] : map_) {
      auto [it, inserted] = parent_of.try_emplace(chain[lvl], chain[lvl - 1]);
      if (!inserted && it->second != chain[lvl - 1])
        fail(Errc::bad_config,
             "value '" + chain[lvl] + "' has two parents at level '" + levels_[lvl - 1] + "'");
    }
  }
}

DimensionHierarchy DimensionHierarchy::from_csv(std::string_view text) {
  CsvTable table = parse_csv(text);
  if (table.header.empty()) fail(Errc::bad_config, "empty hierarchy file");
  // File lists leaf,...,root; internally levels run root..leaf.
  std::vector<std::string> levels(table.header.rbegin(), table.header.rend());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) rows.emplace_back(row.fields.rbegin(), row.fields.rend());
  return DimensionHierarchy(table.header.front(), std::move(levels), std::move(rows));
}

std::optional<std::size_t> DimensionHierarchy::level_index(std::string_view level) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i] == level) return i;
  return std::nullopt;
}

const std::string& DimensionHierarchy::value_at(const std::string& leaf, std::size_t level_idx) const {
  auto it = map_.find(leaf);
  if (it == map_.end()) fail(Errc::unknown_level, "leaf value '" + leaf + "' not in dimension '" + name_ + "'");
  return it->second.at(level_idx);
}

FactTable FactTable::from_csv(std::string_view text) {
  CsvTable table = parse_csv(text);
  FactTable fact;
  fact.columns = table.header;
  fact.rows.reserve(table.rows.size());
  for (auto& row : table.rows) fact.rows.push_back(std::move(row.fields));
  return fact;
}

std::size_t FactTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(Errc::missing_column, std::string(name));
}

const DimensionHierarchy& StarSchema::dimension(std::string_view name) const {
  for (const auto& d : dimensions)
    if (d.name() == name) return d;
  fail(Errc::unknown_dimension, std::string(name));
}

Aggregate parse_aggregate(std::string_view s) {
  if (s == "count") return Aggregate::count;
  if (s == "sum") return Aggregate::sum;
  if (s == "mean") return Aggregate::mean;
  if (s == "min") return Aggregate::min;
  if (s == "max") return Aggregate::max;
  fail(Errc::bad_config, "unknown aggregate '" + std::string(s) + "'");
}

const char* aggregate_name(Aggregate a) {
  switch (a) {
    case Aggregate::count: return "count";
    case Aggregate::sum: return "sum";
    case Aggregate::mean: return "mean";
    case Aggregate::min: return "min";
    case Aggregate::max: return "max";
  }
  return "count";
}

OlapResult aggregate(const FactTable& fact, const StarSchema& schema, const OlapQuery& query) {
  if (query.group_levels.size() != schema.dimensions.size())
    fail(Errc::bad_config, "one group level per dimension required");

  // Resolve levels and the fact columns carrying the dimension leaves.
  struct DimBinding {
    const DimensionHierarchy* dim;
    std::size_t fact_col;
    std::optional<std::size_t> level;  // nullopt = "all"
  };
  std::vector<DimBinding> bindings;
  for (std::size_t i = 0; i < schema.dimensions.size(); ++i) {
    const DimensionHierarchy& dim = schema.dimensions[i];
    const std::string& lvl = query.group_levels[i];
    DimBinding b{&dim, fact.column_index(dim.name()), std::nullopt};
    if (lvl != kGroupAll) {
      b.level = dim.level_index(lvl);
      if (!b.level) fail(Errc::unknown_level, "'" + lvl + "' not a level of '" + dim.name() + "'");
    }
    bindings.push_back(b);
  }

  const bool needs_measure = query.aggregate != Aggregate::count;
  std::size_t measure_col = 0;
  if (needs_measure || !query.measure.empty()) measure_col = fact.column_index(query.measure);

  struct Acc {
    double sum = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    std::uint64_t n = 0;
  };
  std::map<std::vector<std::string>, Acc> groups;
  for (const auto& row : fact.rows) {
    std::vector<std::string> key;
    for (const DimBinding& b : bindings) {
      if (!b.level) continue;  // "all" contributes nothing to the key
      key.push_back(b.dim->value_at(row[b.fact_col], *b.level));
    }
    Acc& acc = groups[std::move(key)];
    ++acc.n;
    if (needs_measure) {
      const std::string& cell = row[measure_col];
      double v = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size())
        fail(Errc::non_numeric_measure, "'" + cell + "' in column '" + query.measure + "'");
      acc.sum += v;
      acc.mn = std::min(acc.mn, v);
      acc.mx = std::max(acc.mx, v);
    }
  }

  OlapResult out;
  for (std::size_t i = 0; i < bindings.size(); ++i)
    if (bindings[i].level) out.key_levels.push_back(query.group_levels[i]);
  for (const auto& [key, acc] : groups) {
    double value = 0.0;
    switch (query.aggregate) {
      case Aggregate::count: value = double(acc.n); break;
      case Aggregate::sum: value = acc.sum; break;
      case Aggregate::mean:
        if (acc.n == 0) fail(Errc::empty_group, "mean of empty group");
        value = acc.sum / double(acc.n);
        break;
      case Aggregate::min: value = acc.mn; break;
      case Aggregate::max: value = acc.mx; break;
    }
    out.rows.push_back(OlapRow{key, value, acc.n});
  }
  return out;
}

namespace {

OlapQuery step(const OlapQuery& query, const StarSchema& schema, std::string_view dimension, int delta) {
  std::size_t dim_idx = schema.dimensions.size();
  for (std::size_t i = 0; i < schema.dimensions.size(); ++i)
    if (schema.dimensions[i].name() == dimension) dim_idx = i;
  if (dim_idx == schema.dimensions.size()) fail(Errc::unknown_dimension, std::string(dimension));
  const DimensionHierarchy& dim = schema.dimensions[dim_idx];

  OlapQuery next = query;
  const std::string& current = query.group_levels.at(dim_idx);
  if (current == kGroupAll) return next;  // "all" is outside the hierarchy walk
  auto idx = dim.level_index(current);
  if (!idx) fail(Errc::unknown_level, "'" + current + "' not a level of '" + dim.name() + "'");
  const std::size_t last = dim.levels().size() - 1;
  if (delta < 0 && *idx == 0) return next;     // already at the root
  if (delta > 0 && *idx == last) return next;  // already at the leaf
  next.group_levels[dim_idx] = dim.levels()[delta > 0 ? *idx + 1 : *idx - 1];
  return next;
}

}  // namespace

OlapQuery roll_up(const OlapQuery& query, const StarSchema& schema, std::string_view dimension) {
  return step(query, schema, dimension, -1);
}

OlapQuery drill_down(const OlapQuery& query, const StarSchema& schema, std::string_view dimension) {
  return step(query, schema, dimension, +1);
}

}  // namespace sky
