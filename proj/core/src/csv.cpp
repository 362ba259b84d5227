#include "promptsent/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "promptsent/errors.hpp"

namespace promptsent::csv {

std::vector<Record> parse(std::string_view text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A lone empty field on a blank line is not a record.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) {
      records.push_back(std::move(current));
    }
    current = Record{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError("stray quote inside unquoted field", line);
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field += c;
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", current.line);
  if (!field.empty() || !current.fields.empty()) end_record();
  return records;
}

Table Table::parse(std::string_view text) {
  Table table;
  auto records = csv::parse(text);
  if (records.empty()) return table;
  table.header_ = std::move(records.front().fields);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.size() != table.header_.size()) {
      throw ParseError("expected " + std::to_string(table.header_.size()) +
                           " fields, found " + std::to_string(records[i].fields.size()),
                       records[i].line);
    }
    table.rows_.push_back(std::move(records[i]));
  }
  return table;
}

Table Table::from_rows(std::vector<std::string> header, std::vector<Record> rows) {
  for (const auto& r : rows) {
    if (r.fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(r.fields.size()),
                       r.line);
  }
  Table table;
  table.header_ = std::move(header);
  table.rows_ = std::move(rows);
  return table;
}

Table Table::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  throw InvalidArgument("missing CSV column '" + std::string(name) + "'");
}

std::vector<std::map<std::string, std::string>> Table::as_maps() const {
  std::vector<std::map<std::string, std::string>> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < header_.size(); ++i) m[header_[i]] = row.fields[i];
    out.push_back(std::move(m));
  }
  return out;
}

std::string escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape(fields[i]);
  }
  out_ << '\n';
}

std::string format_double(double value) {
  if (std::isnan(value)) return std::string(kMissing);
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string(kMissing);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty() || text == kMissing) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace promptsent::csv
