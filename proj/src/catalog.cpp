#include "sky/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "sky/bytes.hpp"
#include "sky/csv.hpp"

namespace sky {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'Y', 'F'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kPageHeaderBytes = 10;  // magic + version u16 + record_count u32

double normalize_ra(double ra) {
  double r = std::fmod(ra, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of values like -1e-16 can land exactly on 360 after the correction
  if (r >= 360.0) r = 0.0;
  return r;
}

}  // namespace

const char* semantic_kind_name(SemanticKind k) {
  switch (k) {
    case SemanticKind::angle: return "angle";
    case SemanticKind::time: return "time";
    case SemanticKind::energy: return "energy";
    case SemanticKind::magnitude: return "magnitude";
    case SemanticKind::flux: return "flux";
    case SemanticKind::error: return "error";
    case SemanticKind::quality: return "quality";
    case SemanticKind::generic: return "generic";
  }
  return "generic";
}

const char* dtype_name(Dtype d) {
  switch (d) {
    case Dtype::f64: return "f64";
    case Dtype::i64: return "i64";
    case Dtype::string: return "string";
  }
  return "f64";
}

SemanticKind parse_semantic_kind(std::string_view s) {
  for (auto k : {SemanticKind::angle, SemanticKind::time, SemanticKind::energy, SemanticKind::magnitude,
                 SemanticKind::flux, SemanticKind::error, SemanticKind::quality, SemanticKind::generic}) {
    if (s == semantic_kind_name(k)) return k;
  }
  fail(Errc::bad_config, "unknown semantic kind '" + std::string(s) + "'");
}

Dtype parse_dtype(std::string_view s) {
  for (auto d : {Dtype::f64, Dtype::i64, Dtype::string}) {
    if (s == dtype_name(d)) return d;
  }
  fail(Errc::bad_config, "unknown dtype '" + std::string(s) + "'");
}

CatalogSchema::CatalogSchema(std::vector<ColumnMeta> columns, std::string ra_column, std::string dec_column)
    : columns_(std::move(columns)), ra_column_(std::move(ra_column)), dec_column_(std::move(dec_column)) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) fail(Errc::bad_config, "duplicate column '" + c.name + "'");
    if (c.kind == SemanticKind::angle && c.unit != "deg" && c.unit != "rad")
      fail(Errc::unit_mismatch, "angle column '" + c.name + "' must be deg or rad, got '" + c.unit + "'");
  }
  // Error columns reference a base column by the <base>_err convention.
  for (const auto& c : columns_) {
    if (c.kind != SemanticKind::error) continue;
    const std::string suffix = "_err";
    if (c.name.size() <= suffix.size() || c.name.substr(c.name.size() - suffix.size()) != suffix ||
        !find_column(c.name.substr(0, c.name.size() - suffix.size())))
      fail(Errc::bad_config, "error column '" + c.name + "' has no base column");
  }
  ra_index_ = column_index(ra_column_);
  dec_index_ = column_index(dec_column_);
  for (auto idx : {ra_index_, dec_index_}) {
    if (columns_[idx].kind != SemanticKind::angle)
      fail(Errc::bad_config, "position column '" + columns_[idx].name + "' is not angle-kind");
    if (columns_[idx].dtype != Dtype::f64)
      fail(Errc::bad_config, "position column '" + columns_[idx].name + "' must be f64");
  }
}

std::optional<std::size_t> CatalogSchema::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

std::size_t CatalogSchema::column_index(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  fail(Errc::missing_column, std::string(name));
}

std::vector<SourceRecord> parse_catalog(std::string_view csv_text, const CatalogSchema& schema) {
  CsvTable table = parse_csv(csv_text);
  if (table.header.empty() && schema.arity() > 0) fail(Errc::missing_column, "empty input, no header");

  // Header cells are "name" or "name[unit]"; build the header -> schema map.
  std::vector<std::size_t> schema_index(table.header.size());
  std::vector<bool> covered(schema.arity(), false);
  for (std::size_t h = 0; h < table.header.size(); ++h) {
    std::string name = table.header[h];
    std::string unit_tag;
    if (auto lb = name.find('['); lb != std::string::npos) {
      if (name.back() != ']') fail(Errc::bad_config, "malformed header cell '" + name + "'");
      unit_tag = name.substr(lb + 1, name.size() - lb - 2);
      name = name.substr(0, lb);
    }
    std::size_t idx = schema.column_index(name);
    const ColumnMeta& col = schema.columns()[idx];
    if (!unit_tag.empty() && unit_tag != col.unit)
      fail(Errc::unit_mismatch, "column '" + name + "' declared '" + col.unit + "', batch tagged '" + unit_tag + "'");
    schema_index[h] = idx;
    covered[idx] = true;
  }
  for (std::size_t i = 0; i < schema.arity(); ++i)
    if (!covered[i]) fail(Errc::missing_column, schema.columns()[i].name);

  std::vector<SourceRecord> records;
  records.reserve(table.rows.size());
  for (const CsvRow& row : table.rows) {
    SourceRecord rec;
    rec.values.resize(schema.arity());
    for (std::size_t h = 0; h < row.fields.size(); ++h) {
      const std::size_t idx = schema_index[h];
      const ColumnMeta& col = schema.columns()[idx];
      const std::string& field = row.fields[h];
      auto bad = [&]() -> Error {
        return Error(Errc::type_mismatch,
                     "line " + std::to_string(row.line_no) + ", column '" + col.name + "': '" + field + "'");
      };
      switch (col.dtype) {
        case Dtype::f64: {
          double v = 0.0;
          auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
          if (ec != std::errc() || p != field.data() + field.size()) throw bad();
          if (col.kind == SemanticKind::angle && col.unit == "rad") v *= 180.0 / std::numbers::pi;
          rec.values[idx] = v;
          break;
        }
        case Dtype::i64: {
          std::int64_t v = 0;
          auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
          if (ec != std::errc() || p != field.data() + field.size()) throw bad();
          rec.values[idx] = v;
          break;
        }
        case Dtype::string:
          rec.values[idx] = field;
          break;
      }
    }
    // Position normalization: RA wraps mod 360, Dec must already be in range.
    double& ra = std::get<double>(rec.values[schema.ra_index()]);
    double& dec = std::get<double>(rec.values[schema.dec_index()]);
    if (std::isnan(ra) || std::isnan(dec))
      fail(Errc::position_out_of_range, "line " + std::to_string(row.line_no) + ": NaN position");
    ra = normalize_ra(ra);
    if (dec < -90.0 || dec > 90.0)
      fail(Errc::position_out_of_range, "line " + std::to_string(row.line_no) + ": dec " + std::to_string(dec));
    records.push_back(std::move(rec));
  }
  return records;
}

RecordStore::RecordStore(CatalogSchema schema, std::vector<SourceRecord> records, std::uint32_t page_size)
    : schema_(std::move(schema)), records_(std::move(records)), page_size_(page_size) {
  for (const auto& r : records_)
    if (r.values.size() != schema_.arity()) fail(Errc::type_mismatch, "record arity != schema arity");
}

std::vector<double> RecordStore::numeric_column(std::string_view name) const {
  std::size_t idx = schema_.column_index(name);
  const ColumnMeta& col = schema_.columns()[idx];
  if (col.dtype == Dtype::string) fail(Errc::type_mismatch, "column '" + col.name + "' is not numeric");
  std::vector<double> out(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const Value& v = records_[i].values[idx];
    out[i] = (col.dtype == Dtype::f64) ? std::get<double>(v) : double(std::get<std::int64_t>(v));
  }
  return out;
}

namespace {

// Fixed row width: 8 bytes per column. String cells hold {heap offset u32,
// length u32}; heap offsets are relative to the page start.
std::size_t row_width(const CatalogSchema& schema) { return 8 * schema.arity(); }

void append_bytes(std::vector<std::byte>& out, const void* p, std::size_t n) {
  const auto* b = static_cast<const std::byte*>(p);
  out.insert(out.end(), b, b + n);
}

void append_u16(std::vector<std::byte>& out, std::uint16_t v) {
  std::byte b[2];
  put_u16(std::span<std::byte>(b, 2), 0, v);
  append_bytes(out, b, 2);
}

void append_u32(std::vector<std::byte>& out, std::uint32_t v) {
  std::byte b[4];
  put_u32(std::span<std::byte>(b, 4), 0, v);
  append_bytes(out, b, 4);
}

void append_u64(std::vector<std::byte>& out, std::uint64_t v) {
  std::byte b[8];
  put_u64(std::span<std::byte>(b, 8), 0, v);
  append_bytes(out, b, 8);
}

void append_str(std::vector<std::byte>& out, const std::string& s) {
  append_u16(out, static_cast<std::uint16_t>(s.size()));
  append_bytes(out, s.data(), s.size());
}

std::vector<std::byte> encode_schema(const CatalogSchema& schema, std::uint32_t page_size,
                                     std::uint32_t page_count, std::uint64_t record_count) {
  std::vector<std::byte> out;
  append_bytes(out, kMagic, 4);
  append_u16(out, kVersion);
  append_u32(out, page_size);
  append_u32(out, page_count);
  append_u64(out, record_count);
  append_u16(out, static_cast<std::uint16_t>(schema.arity()));
  for (const auto& c : schema.columns()) {
    append_str(out, c.name);
    out.push_back(std::byte(static_cast<std::uint8_t>(c.kind)));
    append_str(out, c.unit);
    out.push_back(std::byte(static_cast<std::uint8_t>(c.dtype)));
  }
  append_str(out, schema.ra_column());
  append_str(out, schema.dec_column());
  return out;
}

struct Cursor {
  std::span<const std::byte> buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) fail(Errc::corrupt_header, "truncated store file");
  }
  std::uint16_t u16() { need(2); auto v = get_u16(buf, pos); pos += 2; return v; }
  std::uint32_t u32() { need(4); auto v = get_u32(buf, pos); pos += 4; return v; }
  std::uint64_t u64() { need(8); auto v = get_u64(buf, pos); pos += 8; return v; }
  std::uint8_t u8() { need(1); return std::to_integer<std::uint8_t>(buf[pos++]); }
  std::string str() {
    std::size_t n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf.data()) + pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void write_store(const std::vector<SourceRecord>& records, const CatalogSchema& schema,
                 const std::string& path, std::uint32_t page_size) {
  write_store(RecordStore(schema, records, page_size), path);
}

void write_store(const RecordStore& store, const std::string& path) {
  const CatalogSchema& schema = store.schema();
  const std::uint32_t page_size = store.page_size();
  const std::size_t width = row_width(schema);
  if (kPageHeaderBytes + width > page_size)
    fail(Errc::page_overflow, "page_size " + std::to_string(page_size) + " below one row + header");

  // Pack records into pages: rows grow from the header, string heap from the end.
  std::vector<std::vector<std::byte>> pages;
  std::size_t i = 0;
  while (i < store.record_count()) {
    std::vector<std::byte> page(page_size, std::byte(0));
    std::size_t n_rows = 0;
    std::size_t heap_top = page_size;  // heap grows downward
    while (i < store.record_count()) {
      const SourceRecord& rec = store.record(i);
      std::size_t strings_bytes = 0;
      for (std::size_t c = 0; c < schema.arity(); ++c)
        if (schema.columns()[c].dtype == Dtype::string)
          strings_bytes += std::get<std::string>(rec.values[c]).size();
      const std::size_t row_off = kPageHeaderBytes + n_rows * width;
      if (row_off + width + strings_bytes > heap_top) {
        if (n_rows == 0)
          fail(Errc::page_overflow, "record " + std::to_string(i) + " larger than page payload");
        break;  // page full, start the next one
      }
      for (std::size_t c = 0; c < schema.arity(); ++c) {
        const std::size_t cell = row_off + 8 * c;
        const Value& v = rec.values[c];
        switch (schema.columns()[c].dtype) {
          case Dtype::f64: put_f64(page, cell, std::get<double>(v)); break;
          case Dtype::i64: put_u64(page, cell, std::bit_cast<std::uint64_t>(std::get<std::int64_t>(v))); break;
          case Dtype::string: {
            const std::string& s = std::get<std::string>(v);
            heap_top -= s.size();
            std::memcpy(page.data() + heap_top, s.data(), s.size());
            put_u32(page, cell, static_cast<std::uint32_t>(heap_top));
            put_u32(page, cell + 4, static_cast<std::uint32_t>(s.size()));
            break;
          }
        }
      }
      ++n_rows;
      ++i;
    }
    std::memcpy(page.data(), kMagic, 4);
    put_u16(page, 4, kVersion);
    put_u32(page, 6, static_cast<std::uint32_t>(n_rows));
    pages.push_back(std::move(page));
  }

  std::vector<std::byte> head =
      encode_schema(schema, page_size, static_cast<std::uint32_t>(pages.size()), store.record_count());
  if (head.size() > page_size) fail(Errc::page_overflow, "schema does not fit the header page");
  head.resize(page_size, std::byte(0));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(head.data()), std::streamsize(head.size()));
  for (const auto& p : pages) out.write(reinterpret_cast<const char*>(p.data()), std::streamsize(p.size()));
  if (!out) fail(Errc::io_error, "short write to '" + path + "'");
}

RecordStore read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  std::vector<std::byte> data(std::size_t(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size()));
  if (!in) fail(Errc::io_error, "short read from '" + path + "'");

  Cursor cur{data, 0};
  cur.need(4);
  if (std::memcmp(data.data(), kMagic, 4) != 0) fail(Errc::corrupt_header, "bad magic");
  cur.pos = 4;
  if (cur.u16() != kVersion) fail(Errc::corrupt_header, "unsupported version");
  const std::uint32_t page_size = cur.u32();
  const std::uint32_t page_count = cur.u32();
  const std::uint64_t total = cur.u64();

  std::uint16_t ncols = cur.u16();
  std::vector<ColumnMeta> cols(ncols);
  for (auto& c : cols) {
    c.name = cur.str();
    c.kind = static_cast<SemanticKind>(cur.u8());
    c.unit = cur.str();
    c.dtype = static_cast<Dtype>(cur.u8());
  }
  std::string ra = cur.str(), dec = cur.str();
  CatalogSchema schema(std::move(cols), ra, dec);

  if (data.size() != std::size_t(page_size) * (1 + page_count))
    fail(Errc::corrupt_header, "file size does not match page count");

  const std::size_t width = row_width(schema);
  std::vector<SourceRecord> records;
  records.reserve(total);
  for (std::uint32_t p = 0; p < page_count; ++p) {
    std::span<const std::byte> page(data.data() + std::size_t(page_size) * (1 + p), page_size);
    if (std::memcmp(page.data(), kMagic, 4) != 0) fail(Errc::corrupt_header, "bad page magic");
    if (get_u16(page, 4) != kVersion) fail(Errc::corrupt_header, "bad page version");
    const std::uint32_t n_rows = get_u32(page, 6);
    if (kPageHeaderBytes + std::size_t(n_rows) * width > page_size)
      fail(Errc::corrupt_header, "page row count overflows page");
    for (std::uint32_t r = 0; r < n_rows; ++r) {
      SourceRecord rec;
      rec.values.resize(schema.arity());
      const std::size_t row_off = kPageHeaderBytes + r * width;
      for (std::size_t c = 0; c < schema.arity(); ++c) {
        const std::size_t cell = row_off + 8 * c;
        switch (schema.columns()[c].dtype) {
          case Dtype::f64: rec.values[c] = get_f64(page, cell); break;
          case Dtype::i64: rec.values[c] = std::bit_cast<std::int64_t>(get_u64(page, cell)); break;
          case Dtype::string: {
            const std::uint32_t off = get_u32(page, cell);
            const std::uint32_t len = get_u32(page, cell + 4);
            if (std::size_t(off) + len > page_size) fail(Errc::corrupt_header, "string heap out of range");
            rec.values[c] = std::string(reinterpret_cast<const char*>(page.data()) + off, len);
            break;
          }
        }
      }
      records.push_back(std::move(rec));
    }
  }
  if (records.size() != total) fail(Errc::corrupt_header, "record count mismatch");
  return RecordStore(std::move(schema), std::move(records), page_size);
}

}  // namespace sky
