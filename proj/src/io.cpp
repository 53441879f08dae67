#include "refinery/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>

#include "refinery/errors.hpp"

namespace refinery {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string json_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += "\"";
  return out;
}

void Table::add_row(std::vector<Field> row) {
  require(row.size() == header.size(), Errc::internal, "row width disagrees with header");
  rows.push_back(std::move(row));
}

std::string format_field(const Field& field) {
  if (const auto* i = std::get_if<std::int64_t>(&field)) return std::to_string(*i);
  if (const auto* u = std::get_if<std::uint64_t>(&field)) return std::to_string(*u);
  if (const auto* d = std::get_if<double>(&field)) return format_double(*d);
  return std::get<std::string>(field);
}

namespace {

std::string csv_escape(const std::string& text) {
  const bool needs_quote = text.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quote) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ",";
    out << csv_escape(table.header[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(format_field(row[i]));
    }
    out << "\n";
  }
}

void write_json(const Table& table, std::ostream& out) {
  out << "[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out << ",";
    out << "\n  {";
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << json_quote(table.header[i]) << ":";
      if (std::holds_alternative<std::string>(row[i])) {
        out << json_quote(std::get<std::string>(row[i]));
      } else {
        out << format_field(row[i]);
      }
    }
    out << "}";
  }
  if (!table.rows.empty()) out << "\n";
  out << "]\n";
}

}  // namespace

void write_table(const Table& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) write_csv(table, out);
  else write_json(table, out);
  if (!out) fail(Errc::io_failure, "write failed");
}

void write_table_to(const Table& table, OutputFormat format, const std::string& path) {
  if (path.empty()) {
    write_table(table, format, std::cout);
    std::cout.flush();
    require(static_cast<bool>(std::cout), Errc::io_failure, "stdout write failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::io_failure, "cannot open " + path);
  write_table(table, format, out);
  out.close();
  require(static_cast<bool>(out), Errc::io_failure, "write to " + path + " failed");
}

}  // namespace refinery
