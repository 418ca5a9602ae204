#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace magwell {

/// Numeric CSV table: one header row, then rows of doubles. Lines starting
/// with '#' are comments; `# key: value` comment lines are kept as metadata.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws ParseError
  bool has_column(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  const std::string* meta(const std::string& key) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

void write_csv_header(std::ostream& out, const CsvTable& table);
void write_csv_row(std::ostream& out, const std::vector<double>& row);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Shortest text that parses back to exactly the same double (nan/inf allowed).
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace magwell
