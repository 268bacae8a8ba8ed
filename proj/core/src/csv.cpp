#include <charconv>
#include <string>
#include <vector>

#include "texlayer/database.hpp"
#include "texlayer/error.hpp"

namespace texlayer {

namespace {

void append_field(std::string& out, const std::string& s) {
  const bool quote = s.empty() || s.find_first_of(",\"\r\n") != std::string::npos;
  if (!quote) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct CsvField {
  std::string text;
  bool quoted = false;
};

// RFC-4180 records; CRLF or LF line ends.
std::vector<std::vector<CsvField>> parse_records(std::string_view s) {
  std::vector<std::vector<CsvField>> records;
  std::vector<CsvField> record;
  CsvField field;
  std::size_t i = 0;
  bool at_field_start = true;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field = {};
    at_field_start = true;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < s.size()) {
    const char c = s[i];
    if (at_field_start && c == '"') {
      field.quoted = true;
      ++i;
      for (;;) {
        if (i >= s.size()) fail(ErrorCode::kParseError, "unterminated quoted CSV field");
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            field.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.text += s[i++];
      }
      at_field_start = false;
      if (i < s.size() && s[i] != ',' && s[i] != '\r' && s[i] != '\n') {
        fail(ErrorCode::kParseError, "unexpected character after quoted CSV field");
      }
      continue;
    }
    at_field_start = false;
    if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_record();
      i += (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ? 2 : 1;
    } else if (c == '"') {
      fail(ErrorCode::kParseError, "quote inside an unquoted CSV field");
    } else {
      field.text += c;
      ++i;
    }
  }
  if (!at_field_start || !record.empty() || field.quoted) end_record();
  return records;
}

FieldValue parse_value(const Column& column, const CsvField& f) {
  if (f.text.empty() && !f.quoted) return std::monostate{};
  const char* b = f.text.data();
  const char* e = b + f.text.size();
  switch (column.type) {
    case ColumnType::kInteger: {
      std::int64_t v = 0;
      const auto r = std::from_chars(b, e, v);
      if (r.ec != std::errc() || r.ptr != e) {
        fail(ErrorCode::kParseError, "column '" + column.name + "': bad integer '" + f.text + "'");
      }
      return v;
    }
    case ColumnType::kReal: {
      double v = 0;
      const auto r = std::from_chars(b, e, v);
      if (r.ec != std::errc() || r.ptr != e) {
        fail(ErrorCode::kParseError, "column '" + column.name + "': bad real '" + f.text + "'");
      }
      return v;
    }
    default:
      return f.text;
  }
}

}  // namespace

std::string export_csv(const TableStore& store, std::string_view table) {
  const TableSchema schema = store.schema(table);
  std::string out = "id";
  for (const Column& c : schema.columns) {
    out += ',';
    append_field(out, c.name);
  }
  out += "\r\n";
  for (const Row& row : store.rows(table)) {
    out += std::to_string(row.id);
    for (const FieldValue& v : row.values) {
      out += ',';
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out += std::to_string(*i);
      } else if (const double* d = std::get_if<double>(&v)) {
        out += format_double(*d);
      } else if (const auto* s = std::get_if<std::string>(&v)) {
        append_field(out, *s);
      }
    }
    out += "\r\n";
  }
  return out;
}

std::size_t import_csv(TableStore& store, std::string_view table, std::string_view csv) {
  const TableSchema schema = store.schema(table);
  const auto records = parse_records(csv);
  if (records.empty()) fail(ErrorCode::kParseError, "CSV has no header row");
  const auto& header = records.front();
  bool header_ok = header.size() == schema.columns.size() + 1 && header[0].text == "id";
  for (std::size_t i = 0; header_ok && i < schema.columns.size(); ++i) {
    header_ok = header[i + 1].text == schema.columns[i].name;
  }
  if (!header_ok) fail(ErrorCode::kParseError, "CSV header does not match the table schema");

  std::size_t count = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec[0].text.empty() && !rec[0].quoted) continue;  // blank line
    if (rec.size() != header.size()) {
      fail(ErrorCode::kParseError, "CSV record " + std::to_string(r) + " has " +
                                       std::to_string(rec.size()) + " fields");
    }
    std::uint32_t id = 0;
    const auto& idf = rec[0].text;
    const auto res = std::from_chars(idf.data(), idf.data() + idf.size(), id);
    if (res.ec != std::errc() || res.ptr != idf.data() + idf.size()) {
      fail(ErrorCode::kParseError, "bad id '" + idf + "' in CSV record " + std::to_string(r));
    }
    Row row{id, {}};
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      row.values.push_back(parse_value(schema.columns[i], rec[i + 1]));
    }
    store.upsert_row(table, row);
    ++count;
  }
  return count;
}

}  // namespace texlayer
