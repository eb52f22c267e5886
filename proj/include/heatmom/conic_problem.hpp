#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace heatmom {

struct SlotTerm {
  int slot = 0;
  double coef = 0.0;

  bool operator==(const SlotTerm&) const = default;
};

// Coefficient `coef` of variable `slot` at (row, col), row <= col, of a
// real symmetric block. Repeated (row, col, slot) triples add up.
struct BlockEntry {
  int row = 0;
  int col = 0;
  int slot = 0;
  double coef = 0.0;

  bool operator==(const BlockEntry&) const = default;
};

// X(x) = sum_slot x_slot F_slot, required to be positive semidefinite.
struct PsdBlock {
  int size = 0;
  std::vector<BlockEntry> entries;
};

struct EqualityRow {
  std::vector<SlotTerm> terms;
  double rhs = 0.0;
};

// minimize objective . x  subject to  equalities, X_b(x) PSD for every block.
struct ConicProblem {
  int num_vars = 0;
  std::vector<PsdBlock> blocks;
  std::vector<EqualityRow> equalities;
  std::vector<SlotTerm> objective;
};

// Sums coefficients per slot, drops zeros, sorts by slot.
inline std::vector<SlotTerm> merge_terms(const std::vector<SlotTerm>& terms) {
  std::map<int, double> acc;
  for (const auto& t : terms) acc[t.slot] += t.coef;
  std::vector<SlotTerm> out;
  for (const auto& [s, c] : acc)
    if (c != 0.0) out.push_back({s, c});
  return out;
}

inline void check_well_formed(const ConicProblem& p) {
  auto slot_ok = [&](int s) { return s >= 0 && s < p.num_vars; };
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    if (blk.size <= 0) throw std::invalid_argument("block " + std::to_string(b) + " has no rows");
    for (const auto& e : blk.entries)
      if (e.row < 0 || e.col < e.row || e.col >= blk.size || !slot_ok(e.slot))
        throw std::invalid_argument("block " + std::to_string(b) + " has an entry out of range");
  }
  for (std::size_t r = 0; r < p.equalities.size(); ++r)
    for (const auto& t : p.equalities[r].terms)
      if (!slot_ok(t.slot))
        throw std::invalid_argument("equality " + std::to_string(r) + " references slot " +
                                    std::to_string(t.slot));
  for (const auto& t : p.objective)
    if (!slot_ok(t.slot)) throw std::invalid_argument("objective references slot " + std::to_string(t.slot));
}

inline Eigen::MatrixXd evaluate_block(const PsdBlock& blk, std::span<const double> x) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (const auto& e : blk.entries) {
    m(e.row, e.col) += e.coef * x[static_cast<std::size_t>(e.slot)];
  }
  m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
  return m;
}

inline double evaluate_objective(const ConicProblem& p, std::span<const double> x) {
  double v = 0.0;
  for (const auto& t : p.objective) v += t.coef * x[static_cast<std::size_t>(t.slot)];
  return v;
}

inline double equality_residual(const ConicProblem& p, std::span<const double> x) {
  double worst = 0.0;
  for (const auto& row : p.equalities) {
    double v = -row.rhs;
    for (const auto& t : row.terms) v += t.coef * x[static_cast<std::size_t>(t.slot)];
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double min_block_eigenvalue(const ConicProblem& p, std::span<const double> x) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& blk : p.blocks) worst = std::min(worst, min_eigenvalue(evaluate_block(blk, x)));
  return p.blocks.empty() ? 0.0 : worst;
}

// Order-independent form used for structural comparison: entries merged per
// (row, col, slot), zero coefficients dropped, everything sorted.
inline ConicProblem normalized(const ConicProblem& p) {
  ConicProblem out;
  out.num_vars = p.num_vars;
  for (const auto& blk : p.blocks) {
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& e : blk.entries) acc[{e.row, e.col, e.slot}] += e.coef;
    PsdBlock nb;
    nb.size = blk.size;
    for (const auto& [key, c] : acc)
      if (c != 0.0) nb.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
    out.blocks.push_back(std::move(nb));
  }
  for (const auto& row : p.equalities) out.equalities.push_back({merge_terms(row.terms), row.rhs});
  out.objective = merge_terms(p.objective);
  return out;
}

inline bool structurally_equal(const ConicProblem& a, const ConicProblem& b) {
  const auto na = normalized(a);
  const auto nb = normalized(b);
  if (na.num_vars != nb.num_vars || na.blocks.size() != nb.blocks.size() ||
      na.equalities.size() != nb.equalities.size() || na.objective != nb.objective)
    return false;
  for (std::size_t i = 0; i < na.blocks.size(); ++i)
    if (na.blocks[i].size != nb.blocks[i].size || na.blocks[i].entries != nb.blocks[i].entries) return false;
  for (std::size_t i = 0; i < na.equalities.size(); ++i)
    if (na.equalities[i].rhs != nb.equalities[i].rhs || na.equalities[i].terms != nb.equalities[i].terms)
      return false;
  return true;
}

}  // namespace heatmom
