#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptsent::csv {

// Missing-value marker written for undefined numeric cells.
inline constexpr std::string_view kMissing = "NA";

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC 4180: comma separated, double-quote quoting, embedded newlines allowed
// inside quotes. Accepts LF and CRLF line endings.
std::vector<Record> parse(std::string_view text);

// Header-keyed view of a CSV file. Every data row must have exactly as many
// fields as the header.
class Table {
 public:
  static Table parse(std::string_view text);
  static Table read_file(const std::string& path);
  // Throws ParseError when a row width differs from the header.
  static Table from_rows(std::vector<std::string> header, std::vector<Record> rows);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Record>& rows() const noexcept { return rows_; }
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;

  // Rows as name -> value maps (convenient for the stats/forest layers).
  std::vector<std::map<std::string, std::string>> as_maps() const;

 private:
  std::vector<std::string> header_;
  std::vector<Record> rows_;
};

std::string escape(std::string_view field);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Shortest round-trip decimal representation.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

// Parses a full-string decimal number; nullopt for empty, "NA" or garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace promptsent::csv
