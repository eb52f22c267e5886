#pragma once

#include <complex>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatmom/moment_index.hpp"

namespace heatmom {

using Complex = std::complex<double>;

// Shortest decimal rendering that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

// Complex moments keyed by canonical index. Lookups of a conjugated index
// return the conjugate of the stored value.
class MomentTable {
 public:
  void set(const MomentIndex& idx, Complex value) {
    auto c = canonicalize(idx);
    entries_[std::move(c.index)] = c.conjugated ? std::conj(value) : value;
  }

  std::optional<Complex> find(const MomentIndex& idx) const {
    auto c = canonicalize(idx);
    auto it = entries_.find(c.index);
    if (it == entries_.end()) return std::nullopt;
    return c.conjugated ? std::conj(it->second) : it->second;
  }

  Complex at(const MomentIndex& idx) const {
    if (auto v = find(idx)) return *v;
    throw std::out_of_range("moment " + to_string(idx) + " missing from table");
  }

  bool contains(const MomentIndex& idx) const { return find(idx).has_value(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<MomentIndex, Complex>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<MomentIndex, Complex> entries_;
};

// CSV: l,freqs,re,im with freqs rendered as "n1|n2|...".
inline void write_moment_csv(std::ostream& os, const MomentTable& table) {
  os << "l,freqs,re,im\n";
  for (const auto& [idx, v] : table)
    os << idx.time_degree << ',' << freqs_to_string(idx.freqs) << ',' << format_double(v.real())
       << ',' << format_double(v.imag()) << '\n';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline MomentTable read_moment_csv(std::istream& is) {
  MomentTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || lineno == 1) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 4)
      throw std::invalid_argument("moment CSV line " + std::to_string(lineno) + ": expected 4 columns");
    MomentIndex idx(std::stoi(cells[0]), freqs_from_string(cells[1]));
    table.set(idx, {parse_double(cells[2]), parse_double(cells[3])});
  }
  return table;
}

}  // namespace heatmom
