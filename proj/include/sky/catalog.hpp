// Catalog schema with unit metadata, CSV ingestion and the .skyf binary
// columnar record store consumed by the index builders.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sky/error.hpp"

namespace sky {

enum class SemanticKind : std::uint8_t {
  angle,
  time,
  energy,
  magnitude,
  flux,
  error,
  quality,
  generic,
};

enum class Dtype : std::uint8_t { f64, i64, string };

const char* semantic_kind_name(SemanticKind k);
const char* dtype_name(Dtype d);
SemanticKind parse_semantic_kind(std::string_view s);
Dtype parse_dtype(std::string_view s);

struct ColumnMeta {
  std::string name;
  SemanticKind kind = SemanticKind::generic;
  std::string unit;  // "deg", "rad", "s", "keV", ... free-form for non-angles
  Dtype dtype = Dtype::f64;
};

// One value per schema column.
using Value = std::variant<double, std::int64_t, std::string>;

struct SourceRecord {
  std::vector<Value> values;

  bool operator==(const SourceRecord&) const = default;
};

class CatalogSchema {
 public:
  CatalogSchema() = default;
  // Validates: unique names, angle units deg/rad, error columns naming an
  // existing base column (convention: error column "<base>_err"), position
  // columns present and angle-kind.
  CatalogSchema(std::vector<ColumnMeta> columns, std::string ra_column, std::string dec_column);

  const std::vector<ColumnMeta>& columns() const { return columns_; }
  std::size_t arity() const { return columns_.size(); }
  const std::string& ra_column() const { return ra_column_; }
  const std::string& dec_column() const { return dec_column_; }
  std::size_t ra_index() const { return ra_index_; }
  std::size_t dec_index() const { return dec_index_; }

  // Index of a named column, or missing_column.
  std::size_t column_index(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

 private:
  std::vector<ColumnMeta> columns_;
  std::string ra_column_, dec_column_;
  std::size_t ra_index_ = 0, dec_index_ = 0;
};

// Parses CSV text against the schema. Header names must match the schema
// column set (order-insensitive); a header cell may carry a unit tag as
// "name[unit]", which must agree with the schema's declared unit for that
// column. Angle columns declared in radians are converted to degrees; RA is
// normalized into [0,360) and Dec must land in [-90,90].
std::vector<SourceRecord> parse_catalog(std::string_view csv_text, const CatalogSchema& schema);

class RecordStore {
 public:
  RecordStore() = default;
  RecordStore(CatalogSchema schema, std::vector<SourceRecord> records, std::uint32_t page_size);

  const CatalogSchema& schema() const { return schema_; }
  std::uint32_t page_size() const { return page_size_; }
  std::size_t record_count() const { return records_.size(); }
  const std::vector<SourceRecord>& records() const { return records_; }
  const SourceRecord& record(std::size_t i) const { return records_[i]; }

  // Numeric view of one column (f64 or i64 widened); type_mismatch on strings.
  std::vector<double> numeric_column(std::string_view name) const;

 private:
  CatalogSchema schema_;
  std::vector<SourceRecord> records_;
  std::uint32_t page_size_ = 4096;
};

inline constexpr std::uint32_t kDefaultPageSize = 4096;

// .skyf serialization. Layout is fixed: little-endian, a schema page first,
// then fixed-size data pages, each with header {magic "SKYF", version u16,
// record_count u32} and fixed-width rows (strings length-prefixed into a
// page-local heap growing from the page end).
void write_store(const RecordStore& store, const std::string& path);
void write_store(const std::vector<SourceRecord>& records, const CatalogSchema& schema,
                 const std::string& path, std::uint32_t page_size = kDefaultPageSize);
RecordStore read_store(const std::string& path);

}  // namespace sky
