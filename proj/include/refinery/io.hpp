#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace refinery {

// Full-precision float text: %.17g, round-trips to the same bits.
std::string format_double(double value);

// JSON string literal with escapes, including the quotes.
std::string json_quote(const std::string& text);

enum class OutputFormat { csv, json };

using Field = std::variant<std::int64_t, std::uint64_t, double, std::string>;

// One homogeneous result table: header plus rows of equal width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Field>> rows;

  void add_row(std::vector<Field> row);
};

std::string format_field(const Field& field);

// CSV: RFC-style quoting, LF line endings; JSON: array of row objects with
// keys in header order. Throws IoFailure on stream errors.
void write_table(const Table& table, OutputFormat format, std::ostream& out);

// Writes to `path`, or to stdout when path is empty.
void write_table_to(const Table& table, OutputFormat format, const std::string& path);

}  // namespace refinery
