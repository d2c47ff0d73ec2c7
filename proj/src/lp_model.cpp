#include "modt/lp_model.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "modt/common.hpp"

namespace modt {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

int SolverModel::add_col(const std::string& name, double objective, double lower,
                         double upper, bool integer) {
  col_name.push_back(name);
  lo.push_back(lower);
  hi.push_back(upper);
  obj.push_back(objective);
  is_integer.push_back(integer);
  return num_cols() - 1;
}

int SolverModel::add_row(const std::string& name, RowSense sense, double rhs) {
  Row r;
  r.name = name;
  r.sense = sense;
  r.rhs = rhs;
  rows.push_back(std::move(r));
  return num_rows() - 1;
}

void SolverModel::add_term(int row, int col, double coef) {
  if (coef == 0.0) return;
  rows[static_cast<std::size_t>(row)].terms.emplace_back(col, coef);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* sense_str(RowSense s) {
  switch (s) {
    case RowSense::LE: return "<=";
    case RowSense::GE: return ">=";
    case RowSense::EQ: return "=";
  }
  return "?";
}

}  // namespace

std::string SolverModel::dump() const {
  std::ostringstream out;
  out << "minimize:";
  for (int j = 0; j < num_cols(); ++j) {
    if (obj[j] != 0.0) out << " " << fmt(obj[j]) << "*" << col_name[j];
  }
  out << "\nsubject to:\n";
  for (const Row& r : rows) {
    out << r.name << ":";
    for (const auto& [col, coef] : r.terms)
      out << " " << fmt(coef) << "*" << col_name[col];
    out << " " << sense_str(r.sense) << " " << fmt(r.rhs) << "\n";
  }
  out << "bounds:\n";
  for (int j = 0; j < num_cols(); ++j)
    out << col_name[j] << " in [" << fmt(lo[j]) << ", " << fmt(hi[j]) << "]\n";
  out << "integers:";
  for (int j = 0; j < num_cols(); ++j)
    if (is_integer[j]) out << " " << col_name[j];
  out << "\n";
  return out.str();
}

SolverModel SolverModel::parse(const std::string& text) {
  SolverModel m;
  std::istringstream in(text);
  std::string line;
  enum { kObjective, kRows, kBounds, kIntegers } section = kObjective;
  std::unordered_map<std::string, int> col_of;

  auto intern = [&](const std::string& name) {
    auto it = col_of.find(name);
    if (it != col_of.end()) return it->second;
    int j = m.add_col(name, 0.0, 0.0, kInf, false);
    col_of.emplace(name, j);
    return j;
  };
  auto parse_terms = [&](std::istringstream& ls, int row) {
    std::string tok;
    while (ls >> tok) {
      if (tok == "<=" || tok == ">=" || tok == "=") return tok;
      auto star = tok.find('*');
      if (star == std::string::npos)
        throw DataError("model parse: bad term '" + tok + "'");
      double coef = std::stod(tok.substr(0, star));
      int col = intern(tok.substr(star + 1));
      if (row >= 0)
        m.add_term(row, col, coef);
      else
        m.obj[col] += coef;
    }
    return std::string();
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("minimize:", 0) == 0) {
      std::istringstream ls(line.substr(9));
      parse_terms(ls, -1);
      continue;
    }
    if (line == "subject to:") { section = kRows; continue; }
    if (line == "bounds:") { section = kBounds; continue; }
    if (line.rfind("integers:", 0) == 0) {
      std::istringstream ls(line.substr(9));
      std::string name;
      while (ls >> name) m.is_integer[intern(name)] = true;
      continue;
    }
    if (section == kRows) {
      auto colon = line.find(':');
      if (colon == std::string::npos)
        throw DataError("model parse: bad constraint line '" + line + "'");
      std::string name = line.substr(0, colon);
      std::istringstream ls(line.substr(colon + 1));
      int row = m.add_row(name, RowSense::LE, 0.0);
      std::string sense = parse_terms(ls, row);
      double rhs;
      if (!(ls >> rhs))
        throw DataError("model parse: missing rhs in '" + line + "'");
      m.rows[row].rhs = rhs;
      m.rows[row].sense = sense == "<=" ? RowSense::LE
                        : sense == ">=" ? RowSense::GE
                                        : RowSense::EQ;
    } else if (section == kBounds) {
      // "<name> in [lo, hi]"
      std::istringstream ls(line);
      std::string name, kw, lo_s, hi_s;
      ls >> name >> kw >> lo_s >> hi_s;
      if (kw != "in" || lo_s.front() != '[' || hi_s.back() != ']')
        throw DataError("model parse: bad bound line '" + line + "'");
      int col = intern(name);
      lo_s.erase(0, 1);
      if (lo_s.back() == ',') lo_s.pop_back();
      hi_s.pop_back();
      m.lo[col] = std::stod(lo_s);
      m.hi[col] = std::stod(hi_s);
    }
  }
  return m;
}

}  // namespace modt
