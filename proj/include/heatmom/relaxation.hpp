#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "heatmom/conic_problem.hpp"
#include "heatmom/heat_models.hpp"
#include "heatmom/moment_index.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

struct SlotPair {
  int real_slot = 0;
  std::optional<int> imag_slot;  // absent when the moment is forced real
  bool operator==(const SlotPair&) const = default;
};

// Complex moment as a linear expression in real variables.
struct ComplexExpr {
  std::vector<SlotTerm> re;
  std::vector<SlotTerm> im;

  ComplexExpr& add(const ComplexExpr& other, Complex c) {
    // (cr + i ci)(yr + i yi) = (cr yr - ci yi) + i (cr yi + ci yr)
    for (const auto& t : other.re) {
      if (c.real() != 0.0) re.push_back({t.slot, c.real() * t.coef});
      if (c.imag() != 0.0) im.push_back({t.slot, c.imag() * t.coef});
    }
    for (const auto& t : other.im) {
      if (c.imag() != 0.0) re.push_back({t.slot, -c.imag() * t.coef});
      if (c.real() != 0.0) im.push_back({t.slot, c.real() * t.coef});
    }
    return *this;
  }
};

// Real decision variables for the occupation and terminal moments.
// Occupation: every canonical index of the truncation. Terminal: l = 0 only,
// since terminal moments do not depend on l. Initial moments are data.
class VariableLayout {
 public:
  VariableLayout() = default;

  explicit VariableLayout(const TruncationDegrees& deg) : degrees_(deg) {
    for (const auto& idx : enumerate_moment_vector(deg))
      if (is_canonical(idx)) add(MeasureTag::Occupation, idx);
    for (const auto& freqs : multisets_up_to(deg.algebraic, deg.harmonic)) {
      MomentIndex idx(0, freqs);
      if (is_canonical(idx)) add(MeasureTag::Terminal, idx);
    }
  }

  int num_vars() const { return num_vars_; }
  const TruncationDegrees& degrees() const { return degrees_; }
  const std::map<std::pair<MeasureTag, MomentIndex>, SlotPair>& slots() const { return slots_; }

  // Slots of the canonical representative of (measure, idx), with terminal
  // indices aliased to l = 0.
  std::pair<const SlotPair*, bool> find(MeasureTag measure, const MomentIndex& idx) const {
    if (measure == MeasureTag::Initial) return {nullptr, false};
    auto c = canonicalize(idx);
    if (measure == MeasureTag::Terminal) c.index.time_degree = 0;
    auto it = slots_.find({measure, c.index});
    if (it == slots_.end()) return {nullptr, c.conjugated};
    return {&it->second, c.conjugated};
  }

  ComplexExpr expression(MeasureTag measure, const MomentIndex& idx) const {
    auto [slot, conj] = find(measure, idx);
    if (!slot)
      throw std::out_of_range(std::string(to_string(measure)) + " moment " + to_string(idx) +
                              " has no variable");
    ComplexExpr e;
    e.re.push_back({slot->real_slot, 1.0});
    if (slot->imag_slot) e.im.push_back({*slot->imag_slot, conj ? -1.0 : 1.0});
    return e;
  }

 private:
  void add(MeasureTag measure, const MomentIndex& idx) {
    SlotPair p;
    p.real_slot = num_vars_++;
    if (!is_self_conjugate(idx)) p.imag_slot = num_vars_++;
    slots_.emplace(std::make_pair(measure, idx), p);
  }

  TruncationDegrees degrees_{};
  std::map<std::pair<MeasureTag, MomentIndex>, SlotPair> slots_;
  int num_vars_ = 0;
};

enum class BlockKind { Moment, Localizing };

inline const char* to_string(BlockKind k) { return k == BlockKind::Moment ? "moment" : "localizing"; }

// Hermitian block over `basis`, embedded as the real symmetric block
// [[A, -B], [B, A]] of twice the size.
struct PsdBlockSpec {
  MeasureTag measure = MeasureTag::Occupation;
  BlockKind kind = BlockKind::Moment;
  std::vector<BasisMonomial> basis;

  int hermitian_size() const { return static_cast<int>(basis.size()); }
};

// Moments combined into Hermitian entry (a, b) of a block:
// moment matrix y_{l_a + l_b, ...}; localizing matrix y_{l_a+l_b+1} - y_{l_a+l_b+2}.
inline std::vector<std::pair<double, MomentIndex>> entry_moments(const PsdBlockSpec& spec,
                                                                 const BasisMonomial& row,
                                                                 const BasisMonomial& col) {
  auto idx = entry_index(row, col);
  if (spec.kind == BlockKind::Moment) return {{1.0, idx}};
  auto lo = idx;
  auto hi = idx;
  lo.time_degree += 1;
  hi.time_degree += 2;
  return {{1.0, lo}, {-1.0, hi}};
}

struct Relaxation {
  TruncationDegrees degrees;
  HeatModel model;
  InitialData initial;
  VariableLayout layout;
  std::vector<LinearConstraint> constraints;  // canonical test indices only
  std::vector<PsdBlockSpec> block_specs;      // parallel to problem.blocks
  ConicProblem problem;
};

inline VariableLayout build_layout(const TruncationDegrees& deg) { return VariableLayout(deg); }

inline std::vector<PsdBlockSpec> relaxation_block_specs(const TruncationDegrees& deg) {
  std::vector<PsdBlockSpec> specs;
  specs.push_back({MeasureTag::Occupation, BlockKind::Moment, enumerate_matrix_basis(deg)});
  specs.push_back({MeasureTag::Occupation, BlockKind::Localizing,
                   enumerate_basis(deg.time / 2 - 1, deg.algebraic / 2, deg.harmonic)});
  specs.push_back({MeasureTag::Terminal, BlockKind::Moment, enumerate_basis(0, deg.algebraic / 2, deg.harmonic)});
  return specs;
}

inline PsdBlock embed_block(const PsdBlockSpec& spec, const VariableLayout& layout) {
  const int h = spec.hermitian_size();
  PsdBlock blk;
  blk.size = 2 * h;
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b) {
      ComplexExpr e;
      for (const auto& [w, idx] : entry_moments(spec, spec.basis[a], spec.basis[b]))
        e.add(layout.expression(spec.measure, idx), w);
      const auto re = merge_terms(e.re);
      const auto im = merge_terms(e.im);
      if (a <= b)
        for (const auto& t : re) {
          blk.entries.push_back({a, b, t.slot, t.coef});
          blk.entries.push_back({h + a, h + b, t.slot, t.coef});
        }
      for (const auto& t : im) blk.entries.push_back({a, h + b, t.slot, -t.coef});
    }
  return blk;
}

// Assembles the moment relaxation: PSD occupation moment and localizing
// matrices, PSD terminal moment matrix, real/imaginary parts of the moment
// equations, and the sum of the moment-matrix traces as objective.
inline Relaxation build_problem(const HeatModel& model, const TruncationDegrees& deg, const InitialData& u0) {
  require_solvable(deg);
  Relaxation r;
  r.degrees = deg;
  r.model = model;
  r.initial = u0;
  r.layout = build_layout(deg);
  r.constraints = canonical_constraints(generate_constraints(model, deg));
  r.block_specs = relaxation_block_specs(deg);

  auto& p = r.problem;
  p.num_vars = r.layout.num_vars();
  for (const auto& spec : r.block_specs) p.blocks.push_back(embed_block(spec, r.layout));

  for (const auto& c : r.constraints) {
    ComplexExpr e;
    Complex rhs = c.rhs;
    for (const auto& t : c.terms) {
      if (t.measure == MeasureTag::Initial)
        rhs -= t.coefficient * initial_moment(u0, t.index);
      else
        e.add(r.layout.expression(t.measure, t.index), t.coefficient);
    }
    auto re = merge_terms(e.re);
    auto im = merge_terms(e.im);
    if (!re.empty() || rhs.real() != 0.0) p.equalities.push_back({std::move(re), rhs.real()});
    if (!im.empty() || rhs.imag() != 0.0) p.equalities.push_back({std::move(im), rhs.imag()});
  }

  std::vector<SlotTerm> obj;
  for (std::size_t i = 0; i < r.block_specs.size(); ++i) {
    const auto& spec = r.block_specs[i];
    if (spec.kind != BlockKind::Moment) continue;
    for (const auto& m : spec.basis) {
      auto e = r.layout.expression(spec.measure, entry_index(m, m));
      obj.insert(obj.end(), e.re.begin(), e.re.end());
    }
  }
  p.objective = merge_terms(obj);
  return r;
}

// Variable vector holding the given moments; inverse of extract_pseudomoments.
inline std::vector<double> embed_tables(const Relaxation& r, const MeasureTables& tables) {
  std::vector<double> x(static_cast<std::size_t>(r.layout.num_vars()), 0.0);
  for (const auto& [key, slot] : r.layout.slots()) {
    const Complex v = tables.get(key.first).at(key.second);
    x[static_cast<std::size_t>(slot.real_slot)] = v.real();
    if (slot.imag_slot) x[static_cast<std::size_t>(*slot.imag_slot)] = v.imag();
  }
  return x;
}

// Pseudo-moment tables from a solution vector. Terminal moments are filled
// in for every l; initial moments come from the initial data.
inline MeasureTables extract_pseudomoments(const Relaxation& r, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(r.layout.num_vars()))
    throw std::invalid_argument("solution has " + std::to_string(x.size()) + " entries, relaxation has " +
                                std::to_string(r.layout.num_vars()) + " variables");
  MeasureTables t;
  t.initial = initial_table(r.initial, r.degrees);
  for (const auto& [key, slot] : r.layout.slots()) {
    Complex v{x[static_cast<std::size_t>(slot.real_slot)],
              slot.imag_slot ? x[static_cast<std::size_t>(*slot.imag_slot)] : 0.0};
    if (key.first == MeasureTag::Occupation) {
      t.occupation.set(key.second, v);
    } else {
      for (int ell = 0; ell <= r.degrees.time; ++ell) t.terminal.set(MomentIndex(ell, key.second.freqs), v);
    }
  }
  return t;
}

inline Eigen::MatrixXcd hermitian_block(const PsdBlockSpec& spec, const MeasureTables& tables) {
  const int h = spec.hermitian_size();
  Eigen::MatrixXcd m(h, h);
  const auto& table = tables.get(spec.measure);
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b) {
      Complex v{};
      for (const auto& [w, idx] : entry_moments(spec, spec.basis[a], spec.basis[b])) {
        auto lookup = idx;
        if (spec.measure == MeasureTag::Terminal) lookup.time_degree = 0;
        v += w * table.at(lookup);
      }
      m(a, b) = v;
    }
  return m;
}

inline Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& h) {
  const auto n = h.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

inline double hermitian_min_eigenvalue(const Eigen::MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace heatmom
