#include "texlayer/database.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "texlayer/error.hpp"

namespace texlayer {

std::string_view column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::kInteger: return "integer";
    case ColumnType::kReal: return "real";
    case ColumnType::kText: return "text";
    case ColumnType::kDate: return "date";
    case ColumnType::kBlobRef: return "blob-reference";
  }
  return "text";
}

std::optional<ColumnType> parse_column_type(std::string_view name) {
  for (ColumnType t : {ColumnType::kInteger, ColumnType::kReal, ColumnType::kText,
                       ColumnType::kDate, ColumnType::kBlobRef}) {
    if (column_type_name(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

bool valid_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

bool valid_blob_reference(const std::string& s) {
  if (s.empty() || s.find('\0') != std::string::npos) return false;
  const std::filesystem::path p(s);
  if (p.is_absolute() || p.has_root_name() || p.has_root_directory()) return false;
  for (const auto& part : p) {
    if (part == "..") return false;
  }
  return true;
}

[[noreturn]] void violation(const Column& c, const std::string& what) {
  fail(ErrorCode::kSchemaViolation, "column '" + c.name + "': " + what);
}

std::string quote_ident(std::string_view name) {
  std::string out = "\"";
  for (char ch : name) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string data_table(std::string_view name) { return quote_ident("t:" + std::string(name)); }

}  // namespace

FieldValue coerce_field(const Column& column, FieldValue value) {
  if (std::holds_alternative<std::monostate>(value)) return value;
  switch (column.type) {
    case ColumnType::kInteger:
      if (const double* d = std::get_if<double>(&value)) {
        if (!std::isfinite(*d) || *d != std::trunc(*d) || std::abs(*d) > 9.007199254740992e15) {
          violation(column, "expects an integer");
        }
        return static_cast<std::int64_t>(*d);
      }
      if (!std::holds_alternative<std::int64_t>(value)) violation(column, "expects an integer");
      return value;
    case ColumnType::kReal:
      if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
      if (const double* d = std::get_if<double>(&value)) {
        if (!std::isfinite(*d)) violation(column, "expects a finite real");
        return value;
      }
      violation(column, "expects a real");
    case ColumnType::kText:
      if (!std::holds_alternative<std::string>(value)) violation(column, "expects text");
      return value;
    case ColumnType::kDate: {
      const auto* s = std::get_if<std::string>(&value);
      if (s == nullptr || !valid_date(*s)) violation(column, "expects a YYYY-MM-DD date");
      return value;
    }
    case ColumnType::kBlobRef: {
      const auto* s = std::get_if<std::string>(&value);
      if (s == nullptr || !valid_blob_reference(*s)) {
        violation(column, "expects a relative path inside the project");
      }
      return value;
    }
  }
  return value;
}

struct TableStore::Impl {
  sqlite3* db = nullptr;
  std::vector<TableSchema> schemas;  // creation order

  ~Impl() {
    if (db != nullptr) sqlite3_close_v2(db);
  }

  [[noreturn]] void sql_error(const std::string& what) const {
    fail(ErrorCode::kIoError, what + ": " + sqlite3_errmsg(db));
  }

  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err != nullptr ? err : "unknown";
      sqlite3_free(err);
      fail(ErrorCode::kIoError, "sqlite: " + msg);
    }
  }

  struct Stmt {
    sqlite3_stmt* s = nullptr;
    ~Stmt() { sqlite3_finalize(s); }
  };

  void prepare(Stmt& st, const std::string& sql) const {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &st.s, nullptr) != SQLITE_OK) {
      sql_error("prepare");
    }
  }

  const TableSchema* find(std::string_view name) const {
    for (const TableSchema& s : schemas) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  const TableSchema& require(std::string_view name) const {
    const TableSchema* s = find(name);
    if (s == nullptr) fail(ErrorCode::kUnknownTable, "no table named '" + std::string(name) + "'");
    return *s;
  }

  void init_catalog() {
    exec("CREATE TABLE IF NOT EXISTS texlayer_catalog("
         "ord INTEGER PRIMARY KEY AUTOINCREMENT, name TEXT UNIQUE NOT NULL, schema TEXT NOT NULL)");
    Stmt st;
    prepare(st, "SELECT name, schema FROM texlayer_catalog ORDER BY ord");
    while (sqlite3_step(st.s) == SQLITE_ROW) {
      TableSchema schema;
      schema.name = reinterpret_cast<const char*>(sqlite3_column_text(st.s, 0));
      const auto doc =
          nlohmann::json::parse(reinterpret_cast<const char*>(sqlite3_column_text(st.s, 1)));
      for (const auto& c : doc) {
        const auto type = parse_column_type(c.at("type").get<std::string>());
        if (!type) fail(ErrorCode::kBadSchema, "catalog holds an unknown column type");
        schema.columns.push_back({c.at("name").get<std::string>(), *type});
      }
      schemas.push_back(std::move(schema));
    }
  }

  Row read_row(sqlite3_stmt* s, const TableSchema& schema) const {
    Row row;
    row.id = static_cast<std::uint32_t>(sqlite3_column_int64(s, 0));
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      const int col = static_cast<int>(i) + 1;
      if (sqlite3_column_type(s, col) == SQLITE_NULL) {
        row.values.emplace_back(std::monostate{});
        continue;
      }
      switch (schema.columns[i].type) {
        case ColumnType::kInteger: row.values.emplace_back(sqlite3_column_int64(s, col)); break;
        case ColumnType::kReal: row.values.emplace_back(sqlite3_column_double(s, col)); break;
        default: {
          const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(s, col));
          row.values.emplace_back(
              std::string(text, static_cast<std::size_t>(sqlite3_column_bytes(s, col))));
        }
      }
    }
    return row;
  }
};

namespace {

std::unique_ptr<TableStore::Impl> open_db(const std::string& target, int flags) {
  auto impl = std::make_unique<TableStore::Impl>();
  if (sqlite3_open_v2(target.c_str(), &impl->db, flags, nullptr) != SQLITE_OK) {
    const std::string msg = impl->db != nullptr ? sqlite3_errmsg(impl->db) : "out of memory";
    fail(ErrorCode::kIoError, "cannot open table store '" + target + "': " + msg);
  }
  return impl;
}

void copy_database(sqlite3* from, sqlite3* to) {
  sqlite3_backup* b = sqlite3_backup_init(to, "main", from, "main");
  if (b == nullptr) fail(ErrorCode::kIoError, std::string("backup: ") + sqlite3_errmsg(to));
  const int rc = sqlite3_backup_step(b, -1);
  sqlite3_backup_finish(b);
  if (rc != SQLITE_DONE) fail(ErrorCode::kIoError, std::string("backup: ") + sqlite3_errstr(rc));
}

}  // namespace

TableStore::TableStore() : impl_(open_db(":memory:", SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE)) {
  impl_->init_catalog();
}

TableStore::TableStore(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
TableStore::TableStore(TableStore&&) noexcept = default;
TableStore& TableStore::operator=(TableStore&&) noexcept = default;
TableStore::~TableStore() = default;

TableStore TableStore::open(const std::filesystem::path& path) {
  auto impl = open_db(path.string(), SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  impl->exec("PRAGMA journal_mode=WAL");
  impl->init_catalog();
  return TableStore(std::move(impl));
}

void TableStore::create_table(const TableSchema& schema) {
  if (schema.name.empty()) fail(ErrorCode::kBadSchema, "table name is empty");
  std::set<std::string> seen;
  for (const Column& c : schema.columns) {
    if (c.name.empty()) fail(ErrorCode::kBadSchema, "column name is empty");
    if (c.name == "id") fail(ErrorCode::kBadSchema, "column 'id' is implicit");
    if (!seen.insert(c.name).second) {
      fail(ErrorCode::kBadSchema, "column '" + c.name + "' declared twice");
    }
  }
  if (impl_->find(schema.name) != nullptr) {
    fail(ErrorCode::kDuplicateTable, "table '" + schema.name + "' already exists");
  }
  std::string sql = "CREATE TABLE " + data_table(schema.name) + "(id INTEGER PRIMARY KEY";
  nlohmann::json doc = nlohmann::json::array();
  for (const Column& c : schema.columns) {
    const char* affinity = c.type == ColumnType::kInteger ? " INTEGER"
                           : c.type == ColumnType::kReal  ? " REAL"
                                                          : " TEXT";
    sql += ", " + quote_ident(c.name) + affinity;
    doc.push_back({{"name", c.name}, {"type", std::string(column_type_name(c.type))}});
  }
  sql += ")";
  impl_->exec("BEGIN");
  try {
    impl_->exec(sql);
    Impl::Stmt st;
    impl_->prepare(st, "INSERT INTO texlayer_catalog(name, schema) VALUES(?, ?)");
    const std::string text = doc.dump();
    sqlite3_bind_text(st.s, 1, schema.name.c_str(), static_cast<int>(schema.name.size()),
                      SQLITE_TRANSIENT);
    sqlite3_bind_text(st.s, 2, text.c_str(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
    if (sqlite3_step(st.s) != SQLITE_DONE) impl_->sql_error("catalog insert");
    impl_->exec("COMMIT");
  } catch (...) {
    impl_->exec("ROLLBACK");
    throw;
  }
  impl_->schemas.push_back(schema);
}

bool TableStore::has_table(std::string_view name) const { return impl_->find(name) != nullptr; }

std::vector<std::string> TableStore::table_names() const {
  std::vector<std::string> names;
  for (const TableSchema& s : impl_->schemas) names.push_back(s.name);
  return names;
}

TableSchema TableStore::schema(std::string_view name) const { return impl_->require(name); }

Row TableStore::upsert_row(std::string_view table, const Row& row) {
  const TableSchema& schema = impl_->require(table);
  if (row.id == 0) fail(ErrorCode::kReservedKey, "row id 0 is reserved");
  if (row.values.size() != schema.columns.size()) {
    fail(ErrorCode::kSchemaViolation, "row has " + std::to_string(row.values.size()) +
                                          " values, schema has " +
                                          std::to_string(schema.columns.size()) + " columns");
  }
  Row stored{row.id, {}};
  for (std::size_t i = 0; i < row.values.size(); ++i) {
    stored.values.push_back(coerce_field(schema.columns[i], row.values[i]));
  }
  std::string sql = "INSERT OR REPLACE INTO " + data_table(schema.name) + " VALUES(?";
  for (std::size_t i = 0; i < schema.columns.size(); ++i) sql += ", ?";
  sql += ")";
  Impl::Stmt st;
  impl_->prepare(st, sql);
  sqlite3_bind_int64(st.s, 1, stored.id);
  for (std::size_t i = 0; i < stored.values.size(); ++i) {
    const int slot = static_cast<int>(i) + 2;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            sqlite3_bind_null(st.s, slot);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            sqlite3_bind_int64(st.s, slot, v);
          } else if constexpr (std::is_same_v<T, double>) {
            sqlite3_bind_double(st.s, slot, v);
          } else {
            sqlite3_bind_text(st.s, slot, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
          }
        },
        stored.values[i]);
  }
  if (sqlite3_step(st.s) != SQLITE_DONE) impl_->sql_error("upsert");
  return stored;
}

bool TableStore::delete_row(std::string_view table, std::uint32_t id) {
  const TableSchema& schema = impl_->require(table);
  Impl::Stmt st;
  impl_->prepare(st, "DELETE FROM " + data_table(schema.name) + " WHERE id = ?");
  sqlite3_bind_int64(st.s, 1, id);
  if (sqlite3_step(st.s) != SQLITE_DONE) impl_->sql_error("delete");
  return sqlite3_changes(impl_->db) > 0;
}

std::optional<Row> TableStore::get_row(std::string_view table, std::uint32_t id) const {
  const TableSchema& schema = impl_->require(table);
  Impl::Stmt st;
  impl_->prepare(st, "SELECT * FROM " + data_table(schema.name) + " WHERE id = ?");
  sqlite3_bind_int64(st.s, 1, id);
  if (sqlite3_step(st.s) != SQLITE_ROW) return std::nullopt;
  return impl_->read_row(st.s, schema);
}

std::vector<Row> TableStore::rows(std::string_view table) const {
  const TableSchema& schema = impl_->require(table);
  Impl::Stmt st;
  impl_->prepare(st, "SELECT * FROM " + data_table(schema.name) + " ORDER BY id");
  std::vector<Row> out;
  while (sqlite3_step(st.s) == SQLITE_ROW) out.push_back(impl_->read_row(st.s, schema));
  return out;
}

std::vector<Row> TableStore::rows_by_ids(std::string_view table,
                                         std::span<const std::uint32_t> ids) const {
  const TableSchema& schema = impl_->require(table);
  std::vector<std::uint32_t> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Impl::Stmt st;
  impl_->prepare(st, "SELECT * FROM " + data_table(schema.name) + " WHERE id = ?");
  std::vector<Row> out;
  for (std::uint32_t id : sorted) {
    sqlite3_reset(st.s);
    sqlite3_bind_int64(st.s, 1, id);
    if (sqlite3_step(st.s) == SQLITE_ROW) out.push_back(impl_->read_row(st.s, schema));
  }
  return out;
}

std::size_t TableStore::row_count(std::string_view table) const {
  const TableSchema& schema = impl_->require(table);
  Impl::Stmt st;
  impl_->prepare(st, "SELECT COUNT(*) FROM " + data_table(schema.name));
  if (sqlite3_step(st.s) != SQLITE_ROW) impl_->sql_error("count");
  return static_cast<std::size_t>(sqlite3_column_int64(st.s, 0));
}

void TableStore::save_to(const std::filesystem::path& path) const {
  std::error_code ec;
  for (const char* suffix : {"", "-wal", "-shm"}) {
    std::filesystem::remove(path.string() + suffix, ec);
  }
  auto dest = open_db(path.string(), SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  copy_database(impl_->db, dest->db);
  dest->exec("PRAGMA journal_mode=WAL");
  dest->exec("PRAGMA wal_checkpoint(TRUNCATE)");
}

TableStore TableStore::load_from(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kIoError, "no table store at " + path.string());
  auto src = open_db(path.string(), SQLITE_OPEN_READONLY);
  auto impl = open_db(":memory:", SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  copy_database(src->db, impl->db);
  impl->init_catalog();
  return TableStore(std::move(impl));
}

bool TableStore::same_content(const TableStore& other) const {
  if (impl_->schemas != other.impl_->schemas) return false;
  for (const TableSchema& s : impl_->schemas) {
    if (rows(s.name) != other.rows(s.name)) return false;
  }
  return true;
}

RegionRows rows_for_layer_region(const TableStore& store, const InformationLayer& layer,
                                 std::span<const std::uint32_t> texels) {
  RegionRows out;
  if (layer.kind() != LayerKind::kDatabase) {
    fail(ErrorCode::kInvalidArgument, "region queries need a database layer");
  }
  const auto data = layer.data().as<std::uint32_t>();
  const auto mask = layer.mask().as<std::uint8_t>();
  std::set<std::uint32_t> keys;
  for (std::uint32_t t : texels) {
    if (t >= data.size()) fail(ErrorCode::kInvalidArgument, "texel index outside the layer");
    if (mask[t] != 0 && data[t] != 0) keys.insert(data[t]);
  }
  out.keys.assign(keys.begin(), keys.end());
  if (out.keys.empty()) return out;
  out.rows = store.rows_by_ids(layer.table(), out.keys);
  std::size_t r = 0;
  for (std::uint32_t k : out.keys) {
    if (r < out.rows.size() && out.rows[r].id == k) {
      ++r;
    } else {
      out.dangling.push_back(k);
    }
  }
  return out;
}

RegionRows rows_for_layer_region(const TableStore& store, const InformationLayer& layer,
                                 const TexelRect& rect) {
  std::vector<std::uint32_t> texels;
  const int x0 = std::max(rect.x, 0);
  const int y0 = std::max(rect.y, 0);
  const int x1 = std::min(rect.x + rect.width, layer.width());
  const int y1 = std::min(rect.y + rect.height, layer.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      texels.push_back(static_cast<std::uint32_t>(layer.data().index(x, y)));
    }
  }
  return rows_for_layer_region(store, layer, texels);
}

}  // namespace texlayer
