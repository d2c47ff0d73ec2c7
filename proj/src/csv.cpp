#include "modt/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "modt/common.hpp"

namespace modt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

CsvTable CsvTable::from_string(const std::string& text, const std::string& name) {
  CsvTable t;
  t.name_ = name;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (trim(line)[0] == '#') continue;
    auto cells = split_row(line);
    if (!have_header) {
      t.header_ = cells;
      for (std::size_t i = 0; i < cells.size(); ++i) t.col_index_[cells[i]] = i;
      have_header = true;
    } else {
      if (cells.size() != t.header_.size()) {
        throw DataError(name + ": row " + std::to_string(t.cells_.size() + 2) +
                        ": expected " + std::to_string(t.header_.size()) +
                        " fields, got " + std::to_string(cells.size()));
      }
      t.cells_.push_back(std::move(cells));
    }
  }
  if (!have_header) throw DataError(name + ": missing header row");
  return t;
}

bool CsvTable::has_column(const std::string& col) const {
  return col_index_.count(col) != 0;
}

void CsvTable::fail(std::size_t row, const std::string& what) const {
  throw DataError(name_ + ": row " + std::to_string(row + 2) + ": " + what);
}

const std::string& CsvTable::cell(std::size_t row, const std::string& col) const {
  auto it = col_index_.find(col);
  if (it == col_index_.end())
    throw DataError(name_ + ": missing required column '" + col + "'");
  if (row >= cells_.size()) fail(row, "row index out of range");
  return cells_[row][it->second];
}

double CsvTable::num(std::size_t row, const std::string& col) const {
  const std::string& s = cell(row, col);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    fail(row, "column '" + col + "': cannot parse number from '" + s + "'");
  return v;
}

long long CsvTable::integer(std::size_t row, const std::string& col) const {
  const std::string& s = cell(row, col);
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    fail(row, "column '" + col + "': cannot parse integer from '" + s + "'");
  return v;
}

}  // namespace modt
