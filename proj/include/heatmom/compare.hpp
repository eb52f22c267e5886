#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatmom/heat_models.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

// |y - ref| / max(|ref|, 1e-12); the floor keeps zero reference moments finite.
inline double relative_error(Complex y, Complex ref) {
  return std::abs(y - ref) / std::max(std::abs(ref), 1e-12);
}

// 1e-1, 1e-2, ..., 1e-8
inline std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 8; ++k) t.push_back(std::pow(10.0, -k));
  return t;
}

struct AccuracyBin {
  double threshold = 0.0;
  int matching = 0;
  int total = 0;
  double percentage() const { return total ? 100.0 * matching / total : 0.0; }
};

// Relative error of every entry of `computed` (canonical indices, each
// conjugate pair counted once). Throws naming the first index the
// reference lacks.
inline std::vector<double> relative_errors(const MomentTable& computed, const MomentTable& reference) {
  std::vector<double> errs;
  errs.reserve(computed.size());
  for (const auto& [idx, y] : computed) {
    auto ref = reference.find(idx);
    if (!ref) throw std::out_of_range("reference lacks moment " + to_string(idx));
    errs.push_back(relative_error(y, *ref));
  }
  return errs;
}

inline std::vector<AccuracyBin> accuracy_histogram(const MomentTable& computed, const MomentTable& reference,
                                                   const std::vector<double>& thresholds = default_thresholds()) {
  const auto errs = relative_errors(computed, reference);
  std::vector<AccuracyBin> bins;
  for (double tau : thresholds) {
    AccuracyBin b{tau, 0, static_cast<int>(errs.size())};
    for (double e : errs)
      if (e <= tau) ++b.matching;
    bins.push_back(b);
  }
  return bins;
}

inline double matching_percentage(const MomentTable& computed, const MomentTable& reference, double tau) {
  return accuracy_histogram(computed, reference, {tau}).front().percentage();
}

inline void write_histogram_csv(std::ostream& os, const std::vector<AccuracyBin>& bins) {
  os << "threshold,matching,total,percentage\n";
  for (const auto& b : bins)
    os << format_double(b.threshold) << ',' << b.matching << ',' << b.total << ',' << format_double(b.percentage())
       << '\n';
}

// CSV: measure,l,freqs,re,im over the occupation and terminal tables
// (and the initial one on request).
inline void write_pseudomoment_csv(std::ostream& os, const MeasureTables& t, bool with_initial = false) {
  os << "measure,l,freqs,re,im\n";
  std::vector<MeasureTag> tags{MeasureTag::Occupation, MeasureTag::Terminal};
  if (with_initial) tags.push_back(MeasureTag::Initial);
  for (auto tag : tags)
    for (const auto& [idx, v] : t.get(tag))
      os << to_string(tag) << ',' << idx.time_degree << ',' << freqs_to_string(idx.freqs) << ','
         << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
}

// Reads the occupation rows of a pseudo-moment CSV, or a plain moment CSV
// (l,freqs,re,im).
inline MomentTable read_occupation_csv(std::istream& is) {
  MomentTable table;
  std::string line;
  int lineno = 0;
  bool with_measure = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      with_measure = line.rfind("measure,", 0) == 0;
      continue;
    }
    auto cells = split_csv_line(line);
    const std::size_t want = with_measure ? 5 : 4;
    if (cells.size() != want)
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(want) +
                                  " columns");
    std::size_t o = 0;
    if (with_measure) {
      if (measure_from_string(cells[0]) != MeasureTag::Occupation) continue;
      o = 1;
    }
    MomentIndex idx(std::stoi(cells[o]), freqs_from_string(cells[o + 1]));
    table.set(idx, {parse_double(cells[o + 2]), parse_double(cells[o + 3])});
  }
  return table;
}

}  // namespace heatmom
