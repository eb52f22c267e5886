#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "heatmom/moment_index.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

// u_t = u_xx
struct LinearHeat {};

// u_t = u_xx + eps * <u, f1> <u, f2>, with f_i = psi_{m_i} + psi_{-m_i}.
struct DistributedQuadratic {
  double epsilon = 0.0;
  int m1 = 1;
  int m2 = 1;
};

// u_t = u_xx + eps * u^2
struct LocalQuadratic {
  double epsilon = 0.0;
};

using HeatModel = std::variant<LinearHeat, DistributedQuadratic, LocalQuadratic>;

inline double model_epsilon(const HeatModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LinearHeat>)
          return 0.0;
        else
          return m.epsilon;
      },
      model);
}

inline std::string model_name(const HeatModel& model) {
  switch (model.index()) {
    case 0: return "linear";
    case 1: return "distributed";
    default: return "local";
  }
}

// Finitely many Fourier coefficients u_n(0) of a real initial function.
struct InitialData {
  std::map<Frequency, Complex> coeffs;

  Complex coefficient(Frequency n) const {
    auto it = coeffs.find(n);
    return it == coeffs.end() ? Complex{} : it->second;
  }

  bool is_real_valued(double tol = 1e-14) const {
    for (const auto& [n, c] : coeffs)
      if (std::abs(coefficient(-n) - std::conj(c)) > tol) return false;
    return true;
  }

  // u_{-1}(0) = u_0(0) = u_1(0) = 1.
  static InitialData unit_low_modes() {
    return InitialData{{{-1, 1.0}, {0, 1.0}, {1, 1.0}}};
  }
};

enum class MeasureTag { Initial, Terminal, Occupation };

inline const char* to_string(MeasureTag tag) {
  switch (tag) {
    case MeasureTag::Initial: return "initial";
    case MeasureTag::Terminal: return "terminal";
    default: return "occupation";
  }
}

inline MeasureTag measure_from_string(const std::string& s) {
  if (s == "initial") return MeasureTag::Initial;
  if (s == "terminal") return MeasureTag::Terminal;
  if (s == "occupation") return MeasureTag::Occupation;
  throw std::invalid_argument("unknown measure '" + s + "'");
}

struct ConstraintTerm {
  Complex coefficient;
  MeasureTag measure;
  MomentIndex index;
};

// sum(coefficient * y^measure_index) == rhs
struct LinearConstraint {
  MomentIndex test_index;
  std::vector<ConstraintTerm> terms;
  Complex rhs{};
};

// y^0_{l,n} = 0^l u_{n1}(0)...u_{nk}(0)
inline Complex initial_moment(const InitialData& u0, const MomentIndex& idx) {
  if (idx.time_degree > 0) return {};
  Complex p{1.0, 0.0};
  for (Frequency n : idx.freqs) p *= u0.coefficient(n);
  return p;
}

namespace detail {

class TermAccumulator {
 public:
  void add(Complex c, MeasureTag measure, MomentIndex idx) {
    for (auto& t : terms_)
      if (t.measure == measure && t.index == idx) {
        t.coefficient += c;
        return;
      }
    terms_.push_back({c, measure, std::move(idx)});
  }

  std::vector<ConstraintTerm> take() {
    std::erase_if(terms_, [](const ConstraintTerm& t) { return t.coefficient == Complex{}; });
    return std::move(terms_);
  }

 private:
  std::vector<ConstraintTerm> terms_;
};

inline std::vector<Frequency> without(const std::vector<Frequency>& f, std::size_t j) {
  std::vector<Frequency> out;
  out.reserve(f.size() + 1);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i != j) out.push_back(f[i]);
  return out;
}

// Occupation moments produced by the quadratic term, one entry per summand
// (repeats allowed).
inline std::vector<MomentIndex> quadratic_terms(const HeatModel& model, const MomentIndex& test,
                                                int harmonic) {
  std::vector<MomentIndex> out;
  const auto& f = test.freqs;
  if (const auto* dist = std::get_if<DistributedQuadratic>(&model)) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (f[j] != 0) continue;
      for (int a : {dist->m1, -dist->m1})
        for (int b : {dist->m2, -dist->m2}) {
          auto rest = without(f, j);
          rest.push_back(a);
          rest.push_back(b);
          out.emplace_back(test.time_degree, std::move(rest));
        }
    }
  } else if (std::holds_alternative<LocalQuadratic>(model)) {
    for (std::size_t j = 0; j < f.size(); ++j)
      for (int m = -harmonic; m <= harmonic; ++m) {
        if (std::abs(f[j] - m) > harmonic) continue;
        auto rest = without(f, j);
        rest.push_back(m);
        rest.push_back(f[j] - m);
        out.emplace_back(test.time_degree, std::move(rest));
      }
  }
  return out;
}

}  // namespace detail

// Builds the moment equation for one test index:
//   y^1_{l,n} - y^0_{l,n} - l y_{l-1,n} + N y_{l,n} - eps * (quadratic terms) = 0
// Returns nullopt when a quadratic term leaves the truncation.
inline std::optional<LinearConstraint> constraint_for(const HeatModel& model,
                                                      const TruncationDegrees& deg,
                                                      const MomentIndex& test) {
  detail::TermAccumulator acc;
  acc.add(1.0, MeasureTag::Terminal, test);
  acc.add(-1.0, MeasureTag::Initial, test);
  if (test.time_degree > 0)
    acc.add(-static_cast<double>(test.time_degree), MeasureTag::Occupation,
            MomentIndex(test.time_degree - 1, test.freqs));
  if (const auto n2 = test.squared_norm(); n2 != 0)
    acc.add(static_cast<double>(n2), MeasureTag::Occupation, test);

  const double eps = model_epsilon(model);
  if (eps != 0.0) {
    auto quad = detail::quadratic_terms(model, test, deg.harmonic);
    for (const auto& idx : quad) {
      if (static_cast<int>(idx.algebraic_degree()) > deg.algebraic ||
          idx.harmonic_degree() > deg.harmonic)
        return std::nullopt;
    }
    for (auto& idx : quad) acc.add(-eps, MeasureTag::Occupation, std::move(idx));
  }
  return LinearConstraint{test, acc.take(), Complex{}};
}

inline void validate_model(const HeatModel& model, const TruncationDegrees& deg) {
  if (const auto* dist = std::get_if<DistributedQuadratic>(&model)) {
    if (dist->m1 < 1 || dist->m2 < 1)
      throw std::invalid_argument("distributed nonlinearity modes m1, m2 must be positive");
    if (dist->m1 > deg.harmonic || dist->m2 > deg.harmonic)
      throw std::invalid_argument("distributed nonlinearity modes m1=" + std::to_string(dist->m1) +
                                  ", m2=" + std::to_string(dist->m2) +
                                  " exceed harmonic degree " + std::to_string(deg.harmonic));
  }
  if (!std::isfinite(model_epsilon(model)))
    throw std::invalid_argument("epsilon must be finite");
}

// One constraint per test index l <= d_t, k <= d_a, |n_j| <= d_h, in
// enumeration order. Test indices whose quadratic terms would reference
// moments outside the truncation are dropped. Conjugate test indices are
// both present; see canonical_constraints.
inline std::vector<LinearConstraint> generate_constraints(const HeatModel& model,
                                                          const TruncationDegrees& deg) {
  validate_model(model, deg);
  std::vector<LinearConstraint> out;
  for (const auto& test : enumerate_moment_vector(deg))
    if (auto c = constraint_for(model, deg, test)) out.push_back(std::move(*c));
  return out;
}

// The constraint of a conjugated test index is the conjugate of the
// canonical one, so one per pair suffices.
inline std::vector<LinearConstraint> canonical_constraints(std::vector<LinearConstraint> all) {
  std::erase_if(all, [](const LinearConstraint& c) { return !is_canonical(c.test_index); });
  return all;
}

struct MeasureTables {
  MomentTable initial;
  MomentTable terminal;
  MomentTable occupation;

  const MomentTable& get(MeasureTag tag) const {
    switch (tag) {
      case MeasureTag::Initial: return initial;
      case MeasureTag::Terminal: return terminal;
      default: return occupation;
    }
  }
  MomentTable& get(MeasureTag tag) {
    return const_cast<MomentTable&>(std::as_const(*this).get(tag));
  }
};

inline Complex constraint_value(const LinearConstraint& c, const MeasureTables& tables) {
  Complex sum{};
  for (const auto& t : c.terms) {
    auto v = tables.get(t.measure).find(t.index);
    if (!v)
      throw std::out_of_range(std::string(to_string(t.measure)) + " moment " + to_string(t.index) +
                              " missing (constraint " + to_string(c.test_index) + ")");
    sum += t.coefficient * *v;
  }
  return sum - c.rhs;
}

// max_c |sum(terms) - rhs|
inline double constraint_residual(const std::vector<LinearConstraint>& constraints,
                                  const MeasureTables& tables) {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, std::abs(constraint_value(c, tables)));
  return worst;
}

// Initial moments for every index of the truncation.
inline MomentTable initial_table(const InitialData& u0, const TruncationDegrees& deg) {
  MomentTable t;
  for (const auto& idx : enumerate_moment_vector(deg))
    if (is_canonical(idx)) t.set(idx, initial_moment(u0, idx));
  return t;
}

}  // namespace heatmom
