#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace modt {

// Minimal CSV table with a named-column header row.  Parsing failures carry
// the file name and 1-based row number so loader errors point at the data.
class CsvTable {
 public:
  static CsvTable read_file(const std::string& path);
  static CsvTable from_string(const std::string& text, const std::string& name);

  const std::string& name() const { return name_; }
  std::size_t rows() const { return cells_.size(); }

  bool has_column(const std::string& col) const;

  // Accessors throw DataError naming file, row and column on missing or
  // unparseable cells.  Row indices are 0-based over data rows; diagnostics
  // report the physical row (header + 1).
  const std::string& cell(std::size_t row, const std::string& col) const;
  double num(std::size_t row, const std::string& col) const;
  long long integer(std::size_t row, const std::string& col) const;

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> col_index_;
  std::vector<std::vector<std::string>> cells_;

  [[noreturn]] void fail(std::size_t row, const std::string& what) const;
};

}  // namespace modt
