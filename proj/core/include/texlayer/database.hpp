#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "texlayer/layer.hpp"

namespace texlayer {

enum class ColumnType { kInteger, kReal, kText, kDate, kBlobRef };

std::string_view column_type_name(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view name);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;
  bool operator==(const Column&) const = default;
};

/// The implicit primary key "id" (uint32 >= 1) is not listed in columns.
struct TableSchema {
  std::string name;
  std::vector<Column> columns;
  bool operator==(const TableSchema&) const = default;
};

/// monostate = null. Integer columns take int64, real columns double,
/// text, date (YYYY-MM-DD) and blob-reference (relative path) take strings.
using FieldValue = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Row {
  std::uint32_t id = 0;
  std::vector<FieldValue> values;  // one per schema column
  bool operator==(const Row&) const = default;
};

/// Tables keyed by uint32 ids, backed by SQLite. A default-constructed
/// store lives in memory; open() works on a file in WAL mode.
class TableStore {
 public:
  TableStore();
  static TableStore open(const std::filesystem::path& path);
  TableStore(TableStore&&) noexcept;
  TableStore& operator=(TableStore&&) noexcept;
  ~TableStore();

  /// Throws DuplicateTable, BadSchema.
  void create_table(const TableSchema& schema);
  bool has_table(std::string_view name) const;
  /// Names in creation order.
  std::vector<std::string> table_names() const;
  /// Throws UnknownTable.
  TableSchema schema(std::string_view name) const;

  /// Insert or replace by id. Throws ReservedKey for id 0, SchemaViolation
  /// for values that do not fit the schema, UnknownTable.
  Row upsert_row(std::string_view table, const Row& row);
  bool delete_row(std::string_view table, std::uint32_t id);
  std::optional<Row> get_row(std::string_view table, std::uint32_t id) const;
  /// All rows ordered by id.
  std::vector<Row> rows(std::string_view table) const;
  /// Rows for the given ids (ascending, missing ids skipped).
  std::vector<Row> rows_by_ids(std::string_view table, std::span<const std::uint32_t> ids) const;
  std::size_t row_count(std::string_view table) const;

  /// Consistent copy of the whole store into a WAL-mode file.
  void save_to(const std::filesystem::path& path) const;
  /// In-memory store loaded from a file written by save_to or open.
  static TableStore load_from(const std::filesystem::path& path);

  /// Same tables, schemas and rows.
  bool same_content(const TableStore& other) const;

  struct Impl;

 private:
  explicit TableStore(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Converts and checks a value against a column type; throws
/// SchemaViolation.
FieldValue coerce_field(const Column& column, FieldValue value);

struct RegionRows {
  std::vector<std::uint32_t> keys;      // distinct nonzero masked values, ascending
  std::vector<Row> rows;                // rows for keys that exist
  std::vector<std::uint32_t> dangling;  // keys without a row
};

/// Rows referenced by a database layer over a set of texel indices; texels
/// with mask = false and key 0 are ignored.
RegionRows rows_for_layer_region(const TableStore& store, const InformationLayer& layer,
                                 std::span<const std::uint32_t> texels);
RegionRows rows_for_layer_region(const TableStore& store, const InformationLayer& layer,
                                 const TexelRect& rect);

/// RFC-4180 CSV with a header row "id,<columns...>". Null fields are empty
/// and unquoted; empty strings are written as "".
std::string export_csv(const TableStore& store, std::string_view table);
/// Upserts every record; the header must list id and the schema columns in
/// order. Returns the number of rows read. Throws ParseError, plus the
/// errors of upsert_row.
std::size_t import_csv(TableStore& store, std::string_view table, std::string_view csv);

}  // namespace texlayer
