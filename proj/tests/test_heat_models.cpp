#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "heatmom/analytic_oracle.hpp"
#include "heatmom/galerkin_oracle.hpp"
#include "heatmom/heat_models.hpp"

using namespace heatmom;
using Catch::Approx;

namespace {

const ConstraintTerm* find_term(const LinearConstraint& c, MeasureTag m, const MomentIndex& idx) {
  for (const auto& t : c.terms)
    if (t.measure == m && t.index == idx) return &t;
  return nullptr;
}

LinearConstraint only(const HeatModel& model, const TruncationDegrees& deg, const MomentIndex& test) {
  auto c = constraint_for(model, deg, test);
  REQUIRE(c.has_value());
  return *c;
}

// Conjugate constraint: negate every frequency, conjugate coefficients.
LinearConstraint conjugated(const LinearConstraint& c) {
  LinearConstraint out{negate(c.test_index), {}, std::conj(c.rhs)};
  for (const auto& t : c.terms) out.terms.push_back({std::conj(t.coefficient), t.measure, negate(t.index)});
  return out;
}

bool same_terms(const LinearConstraint& a, const LinearConstraint& b) {
  if (a.terms.size() != b.terms.size() || a.rhs != b.rhs || a.test_index != b.test_index) return false;
  for (const auto& t : a.terms) {
    const auto* u = find_term(b, t.measure, t.index);
    if (!u || u->coefficient != t.coefficient) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("initial moments") {
  const auto u0 = InitialData::unit_low_modes();
  CHECK(initial_moment(u0, MomentIndex(0, {1, -1})) == Complex(1.0));
  CHECK(initial_moment(u0, MomentIndex(2, {1})) == Complex(0.0));
  CHECK(initial_moment(u0, MomentIndex(0, {2})) == Complex(0.0));
  CHECK(initial_moment(u0, MomentIndex(0, {})) == Complex(1.0));

  InitialData c{{{1, Complex(0.5, 2.0)}, {-1, Complex(0.5, -2.0)}}};
  CHECK(c.is_real_valued());
  CHECK(initial_moment(c, MomentIndex(0, {1, 1})) == Complex(0.5, 2.0) * Complex(0.5, 2.0));
  InitialData bad{{{1, Complex(1.0, 1.0)}}};
  CHECK_FALSE(bad.is_real_valued());
}

TEST_CASE("linear constraint examples") {
  const TruncationDegrees deg{2, 2, 2};
  const auto c1 = only(LinearHeat{}, deg, MomentIndex(0, {1}));
  REQUIRE(c1.terms.size() == 3);
  CHECK(find_term(c1, MeasureTag::Terminal, MomentIndex(0, {1}))->coefficient == Complex(1.0));
  CHECK(find_term(c1, MeasureTag::Initial, MomentIndex(0, {1}))->coefficient == Complex(-1.0));
  CHECK(find_term(c1, MeasureTag::Occupation, MomentIndex(0, {1}))->coefficient == Complex(1.0));
  CHECK(c1.rhs == Complex(0.0));

  const auto mass = only(LinearHeat{}, deg, MomentIndex(0, {}));
  REQUIRE(mass.terms.size() == 2);
  CHECK(find_term(mass, MeasureTag::Terminal, MomentIndex(0, {}))->coefficient == Complex(1.0));
  CHECK(find_term(mass, MeasureTag::Initial, MomentIndex(0, {}))->coefficient == Complex(-1.0));

  // l = 2, N = 1 + 4: y1 - y0 - 2 y_{1} + 5 y_{2} = 0
  const auto c2 = only(LinearHeat{}, deg, MomentIndex(2, {-1, 2}));
  CHECK(find_term(c2, MeasureTag::Occupation, MomentIndex(1, {-1, 2}))->coefficient == Complex(-2.0));
  CHECK(find_term(c2, MeasureTag::Occupation, MomentIndex(2, {-1, 2}))->coefficient == Complex(5.0));
}

TEST_CASE("linear constraint count equals the moment vector size") {
  for (TruncationDegrees d : {TruncationDegrees{2, 2, 2}, TruncationDegrees{4, 4, 2}, TruncationDegrees{6, 2, 4}}) {
    const auto cs = generate_constraints(LinearHeat{}, d);
    CHECK(cs.size() == moment_vector_size(d));
    const auto canon = canonical_constraints(cs);
    std::set<MomentIndex> canon_tests;
    for (const auto& c : canon) canon_tests.insert(c.test_index);
    std::size_t expect = 0;
    for (const auto& idx : enumerate_moment_vector(d)) expect += is_canonical(idx);
    CHECK(canon.size() == expect);
    CHECK(canon_tests.size() == expect);
  }
}

TEST_CASE("conjugated test index gives the conjugated constraint") {
  const TruncationDegrees deg{4, 2, 2};
  const HeatModel models[] = {LinearHeat{}, DistributedQuadratic{0.3, 1, 2}, LocalQuadratic{0.7}};
  for (const auto& m : models)
    for (const auto& idx : enumerate_moment_vector(deg)) {
      const auto a = constraint_for(m, deg, idx);
      const auto b = constraint_for(m, deg, negate(idx));
      REQUIRE(a.has_value() == b.has_value());
      if (a) REQUIRE(same_terms(conjugated(*a), *b));
    }
}

TEST_CASE("distributed terms appear only for a zero frequency, with coefficient -eps") {
  const TruncationDegrees deg{2, 4, 2};
  const double eps = 0.25;
  const DistributedQuadratic model{eps, 1, 2};

  const auto none = only(model, deg, MomentIndex(0, {1, 2}));
  CHECK(none.terms.size() == only(LinearHeat{}, deg, MomentIndex(0, {1, 2})).terms.size());

  // n = (0, 1): replacing the zero by (+-1, +-2) gives four moments.
  const auto c = only(model, deg, MomentIndex(1, {0, 1}));
  for (int a : {1, -1})
    for (int b : {2, -2}) {
      const auto* t = find_term(c, MeasureTag::Occupation, MomentIndex(1, {1, a, b}));
      REQUIRE(t != nullptr);
      CHECK(t->coefficient == Complex(-eps));
    }

  // Two zeros: each zero is replaced in turn.
  const auto two = only(model, deg, MomentIndex(0, {0, 0}));
  const auto* t = find_term(two, MeasureTag::Occupation, MomentIndex(0, {0, 1, 2}));
  REQUIRE(t != nullptr);
  CHECK(t->coefficient == Complex(-2.0 * eps));
}

TEST_CASE("local convolution example at harmonic degree 2") {
  const TruncationDegrees deg{2, 2, 2};
  const double eps = 0.1;
  const auto c = only(LocalQuadratic{eps}, deg, MomentIndex(0, {1}));

  // Brute force over |m| <= 2 with |1 - m| <= 2.
  std::vector<int> admissible;
  for (int m = -10; m <= 10; ++m)
    if (std::abs(m) <= 2 && std::abs(1 - m) <= 2) admissible.push_back(m);
  CHECK(admissible == std::vector<int>{-1, 0, 1, 2});

  // (-1,2) and (2,-1) coincide as multisets, as do (0,1) and (1,0).
  CHECK(find_term(c, MeasureTag::Occupation, MomentIndex(0, {-1, 2}))->coefficient == Complex(-2.0 * eps));
  CHECK(find_term(c, MeasureTag::Occupation, MomentIndex(0, {0, 1}))->coefficient == Complex(-2.0 * eps));
  CHECK(c.terms.size() == 3 + 2);
}

TEST_CASE("epsilon zero regenerates the linear constraint set") {
  const TruncationDegrees deg{4, 2, 2};
  const auto lin = generate_constraints(LinearHeat{}, deg);
  for (const HeatModel& m : {HeatModel(DistributedQuadratic{0.0}), HeatModel(LocalQuadratic{0.0})}) {
    const auto cs = generate_constraints(m, deg);
    REQUIRE(cs.size() == lin.size());
    for (std::size_t i = 0; i < cs.size(); ++i) REQUIRE(same_terms(cs[i], lin[i]));
  }
}

TEST_CASE("constraints leaving the truncation are dropped") {
  const TruncationDegrees deg{2, 2, 2};
  // k = d_a with a zero frequency needs degree 3 moments.
  CHECK_FALSE(constraint_for(DistributedQuadratic{1.0}, deg, MomentIndex(0, {0, 1})).has_value());
  CHECK(constraint_for(DistributedQuadratic{1.0}, deg, MomentIndex(0, {1, 1})).has_value());
  for (const auto& c : generate_constraints(LocalQuadratic{1.0}, deg)) CHECK(c.test_index.freqs.size() < 2);
  for (const auto& c : generate_constraints(DistributedQuadratic{1.0}, deg))
    for (const auto& t : c.terms) {
      CHECK(static_cast<int>(t.index.algebraic_degree()) <= deg.algebraic);
      CHECK(t.index.harmonic_degree() <= deg.harmonic);
    }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(generate_constraints(DistributedQuadratic{1.0, 3, 1}, {2, 2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(generate_constraints(DistributedQuadratic{1.0, 0, 1}, {2, 2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(generate_constraints(LocalQuadratic{std::nan("")}, {2, 2, 2}), std::invalid_argument);
}

TEST_CASE("constraint residuals") {
  const auto u0 = InitialData::unit_low_modes();
  const TruncationDegrees deg{4, 2, 2};
  const auto cs = canonical_constraints(generate_constraints(LinearHeat{}, deg));

  CHECK(constraint_residual(cs, analytic_tables(u0, deg)) <= 1e-10);

  // Zero occupation table: residual is the largest |y1 - y0|.
  auto t = analytic_tables(u0, deg);
  double largest = 0.0;
  for (const auto& c : cs) {
    Complex v = -c.rhs;
    for (const auto& term : c.terms)
      if (term.measure != MeasureTag::Occupation) v += term.coefficient * t.get(term.measure).at(term.index);
    largest = std::max(largest, std::abs(v));
  }
  for (const auto& [idx, v] : analytic_tables(u0, deg).occupation) t.occupation.set(idx, 0.0);
  CHECK(constraint_residual(cs, t) == Approx(largest).epsilon(1e-15));
  CHECK(largest == Approx(1.0));  // l > 0, k = 0: y1 = 1, y0 = 0

  const auto g = trajectory_moments(integrate(LinearHeat{}, u0, 1e-3, deg.harmonic), deg);
  CHECK(constraint_residual(cs, g) <= 1e-6);

  MeasureTables partial;
  try {
    constraint_residual(cs, partial);
    FAIL("missing moments were not reported");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
    CHECK(std::string(e.what()).find("(l=0, [])") != std::string::npos);
  }
}

TEST_CASE("constraint sign agrees with the Galerkin flow") {
  // The distributed flow is exact under Galerkin truncation, so its moments
  // must satisfy the constraints up to time discretization only.
  const auto u0 = InitialData::unit_low_modes();
  const TruncationDegrees deg{4, 2, 2};
  const double eps = 0.2;
  const auto g = trajectory_moments(integrate(DistributedQuadratic{eps}, u0, 1e-3, deg.harmonic), deg);
  CHECK(constraint_residual(canonical_constraints(generate_constraints(DistributedQuadratic{eps}, deg)), g) <= 1e-9);
  CHECK(constraint_residual(canonical_constraints(generate_constraints(DistributedQuadratic{-eps}, deg)), g) > 0.1);
}
