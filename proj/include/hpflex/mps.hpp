#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hpflex/error.hpp"
#include "hpflex/lp.hpp"
#include "hpflex/series.hpp"

namespace hpflex {

// Fixed-format MPS names are at most eight characters without blanks. Model
// names are longer, so each is mangled to a short name and the mapping is kept
// in a sidecar file next to the MPS file.
struct MpsNames {
  std::string objective = "COST";
  std::vector<std::string> rows;  // per LP row
  std::vector<std::string> cols;  // per LP column
};

namespace detail {

inline std::string mps_base(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') s.push_back(ch);
    if (s.size() == 8) break;
  }
  return s.empty() ? std::string("X") : s;
}

inline std::string base36(std::size_t v) {
  static constexpr char digits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string s;
  do {
    s.insert(s.begin(), digits[v % 36]);
    v /= 36;
  } while (v);
  return s;
}

// First come keeps the plain prefix; later ones replace its tail by "~" and
// the next free base-36 counter for that prefix.
class NameMangler {
 public:
  explicit NameMangler(std::unordered_set<std::string> reserved) : used_(std::move(reserved)) {}

  std::string operator()(const std::string& name) {
    const std::string base = mps_base(name);
    if (used_.insert(base).second) return base;
    std::size_t& next = counter_[base];
    for (;;) {
      const std::string suffix = "~" + base36(next++);
      const std::string candidate = base.substr(0, 8 - std::min<std::size_t>(suffix.size(), 8)) + suffix;
      if (used_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::unordered_set<std::string> used_;
  std::unordered_map<std::string, std::size_t> counter_;
};

inline std::string mps_field(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

// Deterministic: the same LP always yields the same names. Rows and columns
// share one name space so the map stays bijective in both directions.
inline MpsNames mangle_names(const LinearProgram& lp) {
  MpsNames out;
  detail::NameMangler mangle({out.objective});
  out.rows.reserve(lp.num_rows());
  out.cols.reserve(lp.num_cols());
  for (const auto& n : lp.row_names) out.rows.push_back(mangle(n));
  for (const auto& n : lp.col_names) out.cols.push_back(mangle(n));
  return out;
}

// Names and indicators sit in their fixed columns (2, 5, 15, 40). Values are
// written in shortest round-trip form so re-reading reproduces every double
// exactly; a value longer than twelve characters pushes the rest of its line
// right, which whitespace-tokenizing readers (including ours) accept.
inline void write_mps(std::ostream& out, const LinearProgram& lp, const MpsNames& names) {
  using detail::mps_field;
  auto entry = [&](const std::string& set, const std::string& name, double v) {
    out << "    " << mps_field(set, 8) << "  " << mps_field(name, 8) << "  " << format_number(v) << '\n';
  };

  out << "NAME          " << detail::mps_base(lp.name) << '\n';
  out << "ROWS\n";
  out << " N  " << names.objective << '\n';
  for (int i = 0; i < lp.num_rows(); ++i) {
    const char* type = "N";
    switch (lp.sense(i)) {
      case RowSense::le: type = "L"; break;
      case RowSense::ge:
      case RowSense::ranged: type = "G"; break;
      case RowSense::eq: type = "E"; break;
      case RowSense::free: type = "N"; break;
    }
    out << ' ' << type << "  " << names.rows[i] << '\n';
  }

  out << "COLUMNS\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (lp.cost[j] != 0.0 || lp.col_start[j] == lp.col_start[j + 1]) entry(names.cols[j], names.objective, lp.cost[j]);
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
      entry(names.cols[j], names.rows[lp.row_index[k]], lp.value[k]);
  }

  out << "RHS\n";
  if (lp.objective_offset != 0.0) entry("RHS", names.objective, -lp.objective_offset);
  for (int i = 0; i < lp.num_rows(); ++i) {
    double rhs = 0.0;
    switch (lp.sense(i)) {
      case RowSense::le: rhs = lp.row_upper[i]; break;
      case RowSense::ge:
      case RowSense::ranged:
      case RowSense::eq: rhs = lp.row_lower[i]; break;
      case RowSense::free: continue;
    }
    if (rhs != 0.0) entry("RHS", names.rows[i], rhs);
  }

  bool ranges = false;
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (lp.sense(i) != RowSense::ranged) continue;
    if (!ranges) out << "RANGES\n";
    ranges = true;
    entry("RNG", names.rows[i], lp.row_upper[i] - lp.row_lower[i]);
  }

  out << "BOUNDS\n";
  auto bound = [&](const char* type, const std::string& col, const double* v) {
    out << ' ' << type << " BND       ";
    if (v) out << mps_field(col, 8) << "  " << format_number(*v);
    else out << col;
    out << '\n';
  };
  for (int j = 0; j < lp.num_cols(); ++j) {
    const double lo = lp.col_lower[j], up = lp.col_upper[j];
    const auto& c = names.cols[j];
    const bool flo = std::isfinite(lo), fup = std::isfinite(up);
    if (flo && fup && lo == up) {
      bound("FX", c, &lo);
      continue;
    }
    if (!flo && !fup) {
      bound("FR", c, nullptr);
      continue;
    }
    if (!flo) bound("MI", c, nullptr);
    else if (lo != 0.0 || (fup && up < 0.0)) bound("LO", c, &lo);
    if (fup) bound("UP", c, &up);
  }
  out << "ENDATA\n";
}

// Whitespace-tokenizing reader for fixed or free MPS. The first N row is the
// objective; an RHS entry on it is the negated objective constant.
inline LinearProgram read_mps(std::istream& in, const std::string& source = "<stream>") {
  constexpr double inf = std::numeric_limits<double>::infinity();
  enum class Section { none, name, rows, columns, rhs, ranges, bounds, end } section = Section::none;
  std::string objective;
  std::vector<std::string> row_names;
  std::vector<char> row_type;
  std::unordered_map<std::string, int> row_of, col_of;
  std::vector<std::string> col_names;
  std::vector<double> cost, rhs, range;
  std::vector<char> has_range, lower_set;
  std::vector<double> lower, upper;
  std::vector<std::vector<std::pair<int, double>>> entries;
  double offset = 0.0;
  std::string name = "hpflex";

  int line_no = 0;
  auto where = [&] { return source + ":" + std::to_string(line_no); };
  auto parse_value = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::io, where() + ": bad number '" + s + "'");
    }
  };
  auto row_index = [&](const std::string& r) -> int {
    if (r == objective) return -1;
    auto it = row_of.find(r);
    if (it == row_of.end()) fail(ErrorKind::io, where() + ": unknown row '" + r + "'");
    return it->second;
  };
  auto col_index = [&](const std::string& c) -> int {
    auto it = col_of.find(c);
    if (it == col_of.end()) fail(ErrorKind::io, where() + ": unknown column '" + c + "'");
    return it->second;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        section = Section::name;
        if (tok.size() > 1) name = tok[1];
      } else if (head == "ROWS") section = Section::rows;
      else if (head == "COLUMNS") section = Section::columns;
      else if (head == "RHS") section = Section::rhs;
      else if (head == "RANGES") section = Section::ranges;
      else if (head == "BOUNDS") section = Section::bounds;
      else if (head == "ENDATA") {
        section = Section::end;
        break;
      } else fail(ErrorKind::io, where() + ": unsupported section '" + head + "'");
      continue;
    }

    switch (section) {
      case Section::rows: {
        if (tok.size() != 2) fail(ErrorKind::io, where() + ": malformed ROWS line");
        const char type = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0][0])));
        if (type == 'N' && objective.empty()) {
          objective = tok[1];
          break;
        }
        if (std::string("NLGE").find(type) == std::string::npos || tok[0].size() != 1)
          fail(ErrorKind::io, where() + ": unknown row type '" + tok[0] + "'");
        if (!row_of.emplace(tok[1], static_cast<int>(row_names.size())).second)
          fail(ErrorKind::io, where() + ": duplicate row '" + tok[1] + "'");
        row_names.push_back(tok[1]);
        row_type.push_back(type);
        rhs.push_back(0.0);
        range.push_back(0.0);
        has_range.push_back(0);
        break;
      }
      case Section::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") fail(ErrorKind::io, where() + ": integer markers are not supported");
        if (tok.size() != 3 && tok.size() != 5) fail(ErrorKind::io, where() + ": malformed COLUMNS line");
        auto [it, fresh] = col_of.emplace(tok[0], static_cast<int>(col_names.size()));
        if (fresh) {
          col_names.push_back(tok[0]);
          cost.push_back(0.0);
          lower.push_back(0.0);
          upper.push_back(inf);
          lower_set.push_back(0);
          entries.emplace_back();
        } else if (it->second != static_cast<int>(col_names.size()) - 1) {
          fail(ErrorKind::io, where() + ": column '" + tok[0] + "' is not contiguous");
        }
        const int j = it->second;
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const int r = row_index(tok[k]);
          const double v = parse_value(tok[k + 1]);
          if (r < 0) cost[j] += v;
          else entries[j].push_back({r, v});
        }
        break;
      }
      case Section::rhs:
      case Section::ranges: {
        const std::size_t first = tok.size() % 2 == 1 ? 1 : 0;  // optional set name
        if (tok.size() < 2 || tok.size() > 5) fail(ErrorKind::io, where() + ": malformed RHS/RANGES line");
        for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
          const int r = row_index(tok[k]);
          const double v = parse_value(tok[k + 1]);
          if (section == Section::rhs) {
            if (r < 0) offset = -v;
            else rhs[r] = v;
          } else {
            if (r < 0) fail(ErrorKind::io, where() + ": range on the objective row");
            range[r] = v;
            has_range[r] = 1;
          }
        }
        break;
      }
      case Section::bounds: {
        std::string type = tok[0];
        for (auto& ch : type) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        const bool valueless = type == "FR" || type == "MI" || type == "PL";
        const std::size_t need = valueless ? 2 : 3;
        if (tok.size() != need && tok.size() != need + 1) fail(ErrorKind::io, where() + ": malformed BOUNDS line");
        const std::size_t ci = tok.size() == need + 1 ? 2 : 1;
        const int j = col_index(tok[ci]);
        const double v = valueless ? 0.0 : parse_value(tok[ci + 1]);
        if (type == "UP") {
          upper[j] = v;
          if (v < 0.0 && !lower_set[j] && lower[j] == 0.0) lower[j] = -inf;
        } else if (type == "LO") {
          lower[j] = v;
          lower_set[j] = 1;
        } else if (type == "FX") {
          lower[j] = upper[j] = v;
          lower_set[j] = 1;
        } else if (type == "FR") {
          lower[j] = -inf;
          upper[j] = inf;
          lower_set[j] = 1;
        } else if (type == "MI") {
          lower[j] = -inf;
          lower_set[j] = 1;
        } else if (type == "PL") {
          upper[j] = inf;
        } else {
          fail(ErrorKind::io, where() + ": unsupported bound type '" + tok[0] + "'");
        }
        break;
      }
      default:
        fail(ErrorKind::io, where() + ": data outside a section");
    }
  }
  if (section != Section::end) fail(ErrorKind::io, source + ": missing ENDATA");
  if (objective.empty()) fail(ErrorKind::io, source + ": no objective row");

  LpBuilder b;
  b.set_name(name);
  for (std::size_t j = 0; j < col_names.size(); ++j) b.add_column(col_names[j], lower[j], upper[j], cost[j], "");
  std::vector<std::vector<std::pair<int, double>>> by_row(row_names.size());
  for (std::size_t j = 0; j < entries.size(); ++j)
    for (const auto& [r, v] : entries[j]) by_row[r].push_back({static_cast<int>(j), v});
  for (std::size_t i = 0; i < row_names.size(); ++i) {
    double lo = -inf, up = inf;
    const double r = rhs[i], R = range[i];
    switch (row_type[i]) {
      case 'L':
        up = r;
        if (has_range[i]) lo = r - std::abs(R);
        break;
      case 'G':
        lo = r;
        if (has_range[i]) up = r + std::abs(R);
        break;
      case 'E':
        lo = up = r;
        if (has_range[i]) (R >= 0 ? up : lo) = r + R;
        break;
      default: break;
    }
    b.add_row(row_names[i], lo, up, "", by_row[i]);
  }
  b.add_objective_offset(offset);
  return std::move(b).finish();
}

// Sidecar: one line per name, `kind,mangled,original,family`; originals are
// quoted CSV fields since model names contain commas.
inline void write_name_map(std::ostream& out, const LinearProgram& lp, const MpsNames& names) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q.push_back('"');
      q.push_back(ch);
    }
    return q + "\"";
  };
  out << "kind,mangled,original,family\n";
  out << "objective," << names.objective << ",,\n";
  for (int i = 0; i < lp.num_rows(); ++i)
    out << "row," << names.rows[i] << ',' << quote(lp.row_names[i]) << ',' << quote(lp.row_families[i]) << '\n';
  for (int j = 0; j < lp.num_cols(); ++j)
    out << "col," << names.cols[j] << ',' << quote(lp.col_names[j]) << ',' << quote(lp.col_families[j]) << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv_quoted(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back().push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back().push_back(ch);
    }
  }
  return out;
}

}  // namespace detail

// Restores original names and families in place; the map must cover every
// row and column exactly once.
inline void apply_name_map(std::istream& in, LinearProgram& lp, const std::string& source = "<stream>") {
  std::unordered_map<std::string, std::pair<std::string, std::string>> rows, cols;
  std::set<std::string> originals_r, originals_c;
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_quoted(line).size() != 4)
    fail(ErrorKind::io, source + ": bad name map header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_quoted(line);
    if (f.size() != 4) fail(ErrorKind::io, source + ": malformed name map line '" + line + "'");
    if (f[0] == "objective") continue;
    auto& target = f[0] == "row" ? rows : cols;
    auto& seen = f[0] == "row" ? originals_r : originals_c;
    if (f[0] != "row" && f[0] != "col") fail(ErrorKind::io, source + ": unknown kind '" + f[0] + "'");
    if (!target.emplace(f[1], std::make_pair(f[2], f[3])).second || !seen.insert(f[2]).second)
      fail(ErrorKind::io, source + ": name map is not bijective at '" + f[1] + "'");
  }
  if (rows.size() != static_cast<std::size_t>(lp.num_rows()) || cols.size() != static_cast<std::size_t>(lp.num_cols()))
    fail(ErrorKind::io, source + ": name map does not match the MPS file");
  LinearProgram out = lp;
  for (int i = 0; i < lp.num_rows(); ++i) {
    auto it = rows.find(lp.row_names[i]);
    if (it == rows.end()) fail(ErrorKind::io, source + ": no original name for row " + lp.row_names[i]);
    out.row_names[i] = it->second.first;
    out.row_families[i] = it->second.second;
  }
  for (int j = 0; j < lp.num_cols(); ++j) {
    auto it = cols.find(lp.col_names[j]);
    if (it == cols.end()) fail(ErrorKind::io, source + ": no original name for column " + lp.col_names[j]);
    out.col_names[j] = it->second.first;
    out.col_families[j] = it->second.second;
  }
  out.check();
  lp = std::move(out);
}

inline std::filesystem::path name_map_path(const std::filesystem::path& mps) {
  auto p = mps;
  p += ".names.csv";
  return p;
}

// Writes `path` and its sidecar name map `path.names.csv`.
inline MpsNames export_mps(const LinearProgram& lp, const std::filesystem::path& path) {
  const auto names = mangle_names(lp);
  {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    write_mps(out, lp, names);
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
  }
  const auto side = name_map_path(path);
  std::ofstream out(side);
  if (!out) fail(ErrorKind::io, "cannot write " + side.string());
  write_name_map(out, lp, names);
  if (!out) fail(ErrorKind::io, "write failed: " + side.string());
  return names;
}

// Reads `path`; original names are restored when the sidecar exists.
inline LinearProgram import_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  auto lp = read_mps(in, path.string());
  const auto side = name_map_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream map(side);
    if (!map) fail(ErrorKind::io, "cannot open " + side.string());
    apply_name_map(map, lp, side.string());
  }
  return lp;
}

// Solution exchange with external solvers: `column_name,value`.
inline void write_solution_csv(std::ostream& out, const LinearProgram& lp, std::span<const double> x) {
  out << "column_name,value\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    const auto& n = lp.col_names[j];
    if (n.find_first_of(",\"") != std::string::npos) {
      out << '"';
      for (char ch : n) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << n;
    }
    out << ',' << format_number(x[j]) << '\n';
  }
}

// Every LP column must appear exactly once; unknown names are rejected.
inline std::vector<double> read_solution_csv(std::istream& in, const LinearProgram& lp,
                                             const std::string& source = "<stream>") {
  std::vector<double> x(lp.num_cols(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_quoted(line) != std::vector<std::string>{"column_name", "value"})
    fail(ErrorKind::bad_header, source + ": expected 'column_name,value'");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_quoted(line);
    const std::string at = source + ":" + std::to_string(line_no);
    if (f.size() != 2) fail(ErrorKind::malformed_row, at);
    const auto j = lp.find_column(f[0]);
    if (!j) fail(ErrorKind::malformed_row, at + ": unknown column '" + f[0] + "'");
    if (!std::isnan(x[*j])) fail(ErrorKind::malformed_row, at + ": duplicate column '" + f[0] + "'");
    try {
      std::size_t used = 0;
      x[*j] = std::stod(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument(f[1]);
    } catch (const std::exception&) {
      fail(ErrorKind::malformed_row, at + ": bad value '" + f[1] + "'");
    }
  }
  for (int j = 0; j < lp.num_cols(); ++j)
    if (std::isnan(x[j])) fail(ErrorKind::missing_value, source + ": no value for column " + lp.col_names[j]);
  return x;
}

}  // namespace hpflex
