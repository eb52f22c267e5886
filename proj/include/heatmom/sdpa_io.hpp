#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "heatmom/conic_problem.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

// SDPA sparse format, primal form
//   minimize c.x  subject to  sum_i x_i F_i - F_0 PSD.
// Our variables are the SDPA variables. PSD blocks carry F_i directly (F_0 = 0).
// Each equality a.x = b becomes two diagonal entries a.x - b >= 0 and
// b - a.x >= 0 of one trailing LP block.
inline void write_sdpa(std::ostream& os, const ConicProblem& problem) {
  check_well_formed(problem);
  const auto p = normalized(problem);
  const int neq = static_cast<int>(p.equalities.size());
  const int nblocks = static_cast<int>(p.blocks.size()) + (neq > 0 ? 1 : 0);

  os << p.num_vars << '\n' << nblocks << '\n';
  for (std::size_t b = 0; b < p.blocks.size(); ++b) os << (b ? " " : "") << p.blocks[b].size;
  if (neq > 0) os << (p.blocks.empty() ? "" : " ") << -2 * neq;
  os << '\n';

  std::vector<double> c(static_cast<std::size_t>(p.num_vars), 0.0);
  for (const auto& t : p.objective) c[static_cast<std::size_t>(t.slot)] = t.coef;
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << format_double(c[i]);
  os << '\n';

  // Sorted by (matno, blkno, i, j) as most readers expect.
  std::map<std::tuple<int, int, int, int>, double> entries;
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (const auto& e : p.blocks[b].entries)
      entries[{e.slot + 1, static_cast<int>(b) + 1, e.row + 1, e.col + 1}] = e.coef;
  const int lp = static_cast<int>(p.blocks.size()) + 1;
  for (int r = 0; r < neq; ++r) {
    const auto& row = p.equalities[static_cast<std::size_t>(r)];
    if (row.rhs != 0.0) {
      entries[{0, lp, 2 * r + 1, 2 * r + 1}] = row.rhs;
      entries[{0, lp, 2 * r + 2, 2 * r + 2}] = -row.rhs;
    }
    for (const auto& t : row.terms) {
      entries[{t.slot + 1, lp, 2 * r + 1, 2 * r + 1}] = t.coef;
      entries[{t.slot + 1, lp, 2 * r + 2, 2 * r + 2}] = -t.coef;
    }
  }
  for (const auto& [key, v] : entries) {
    const auto [mat, blk, i, j] = key;
    os << mat << ' ' << blk << ' ' << i << ' ' << j << ' ' << format_double(v) << '\n';
  }
}

inline void export_sdpa(const ConicProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_sdpa(out, problem);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

namespace detail {

// Next non-comment line; SDPA allows leading '"' or '*' comment lines.
inline bool sdpa_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '"' || line[pos] == '*') continue;
    for (char& ch : line)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    return true;
  }
  return false;
}

}  // namespace detail

// Reads a file produced by write_sdpa back into a ConicProblem. A trailing
// diagonal block with paired entries is read back as equality rows.
inline ConicProblem read_sdpa(std::istream& is) {
  std::string line;
  auto need = [&](const char* what) {
    if (!detail::sdpa_line(is, line)) throw std::runtime_error(std::string("SDPA file ends before ") + what);
    return std::istringstream(line);
  };
  ConicProblem p;
  int nblocks = 0;
  need("variable count") >> p.num_vars;
  need("block count") >> nblocks;
  if (p.num_vars < 0 || nblocks < 0) throw std::runtime_error("SDPA header has negative counts");

  std::vector<int> sizes;
  {
    auto ss = need("block sizes");
    int s = 0;
    while (static_cast<int>(sizes.size()) < nblocks && ss >> s) sizes.push_back(s);
    if (static_cast<int>(sizes.size()) != nblocks) throw std::runtime_error("SDPA block size line is short");
  }
  int lp_block = -1, neq = 0;
  for (int b = 0; b < nblocks; ++b) {
    if (sizes[b] < 0) {
      if (lp_block >= 0 || b != nblocks - 1 || (-sizes[b]) % 2 != 0)
        throw std::runtime_error("unsupported diagonal block layout");
      lp_block = b;
      neq = -sizes[b] / 2;
    } else {
      p.blocks.push_back({sizes[b], {}});
    }
  }
  p.equalities.assign(static_cast<std::size_t>(neq), {});

  {
    auto ss = need("objective vector");
    std::string tok;
    for (int i = 0; i < p.num_vars; ++i) {
      if (!(ss >> tok)) throw std::runtime_error("SDPA objective vector is short");
      const double v = parse_double(tok);
      if (v != 0.0) p.objective.push_back({i, v});
    }
  }

  while (detail::sdpa_line(is, line)) {
    std::istringstream ss(line);
    int mat = 0, blk = 0, i = 0, j = 0;
    std::string tok;
    if (!(ss >> mat >> blk >> i >> j >> tok)) throw std::runtime_error("malformed SDPA entry: " + line);
    const double v = parse_double(tok);
    if (mat < 0 || mat > p.num_vars || blk < 1 || blk > nblocks)
      throw std::runtime_error("SDPA entry out of range: " + line);
    const int b = blk - 1;
    if (b == lp_block) {
      if (i != j || i < 1 || i > 2 * neq) throw std::runtime_error("bad diagonal entry: " + line);
      if (i % 2 == 0) continue;  // mirror of the preceding row
      auto& row = p.equalities[static_cast<std::size_t>((i - 1) / 2)];
      if (mat == 0)
        row.rhs = v;
      else
        row.terms.push_back({mat - 1, v});
      continue;
    }
    if (mat == 0) {
      if (v != 0.0) throw std::runtime_error("constant PSD terms are not representable: " + line);
      continue;
    }
    if (i > j) std::swap(i, j);
    if (i < 1 || j > sizes[b]) throw std::runtime_error("SDPA entry out of range: " + line);
    p.blocks[static_cast<std::size_t>(b)].entries.push_back({i - 1, j - 1, mat - 1, v});
  }
  return normalized(p);
}

inline ConicProblem import_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sdpa(in);
}

inline void write_solution(std::ostream& os, const std::vector<double>& x) {
  for (double v : x) os << format_double(v) << '\n';
}

// One value per line, in the problem's variable order.
inline std::vector<double> read_solution(std::istream& is, const ConicProblem& problem) {
  std::vector<double> x;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) x.push_back(parse_double(tok));
  }
  if (x.size() != static_cast<std::size_t>(problem.num_vars))
    throw std::invalid_argument("dimension mismatch: solution has " + std::to_string(x.size()) +
                             " values, problem has " + std::to_string(problem.num_vars) + " variables");
  return x;
}

inline std::vector<double> import_solution(const std::string& path, const ConicProblem& problem) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_solution(in, problem);
}

}  // namespace heatmom
