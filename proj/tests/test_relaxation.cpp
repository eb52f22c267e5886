#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "heatmom/analytic_oracle.hpp"
#include "heatmom/relaxation.hpp"

using namespace heatmom;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("block sizes at (2,2,2)") {
  const auto r = build_problem(LinearHeat{}, {2, 2, 2}, InitialData::unit_low_modes());
  REQUIRE(r.block_specs.size() == 3);
  CHECK(r.block_specs[0].hermitian_size() == 12);
  CHECK(r.block_specs[1].hermitian_size() == 6);
  CHECK(r.block_specs[2].hermitian_size() == 6);
  CHECK(r.block_specs[1].kind == BlockKind::Localizing);
  CHECK(r.block_specs[2].measure == MeasureTag::Terminal);
  CHECK(r.problem.blocks[0].size == 24);
  CHECK(r.problem.blocks[1].size == 12);
  CHECK(r.problem.blocks[2].size == 12);
  CHECK_NOTHROW(check_well_formed(r.problem));
}

TEST_CASE("variable layout") {
  const VariableLayout layout({2, 2, 2});
  auto [self, c1] = layout.find(MeasureTag::Occupation, MomentIndex(0, {1, -1}));
  REQUIRE(self != nullptr);
  CHECK_FALSE(self->imag_slot.has_value());

  auto [pair, c2] = layout.find(MeasureTag::Occupation, MomentIndex(0, {1}));
  REQUIRE(pair != nullptr);
  CHECK(pair->imag_slot.has_value());

  auto [t2, c3] = layout.find(MeasureTag::Terminal, MomentIndex(2, {1}));
  auto [t0, c4] = layout.find(MeasureTag::Terminal, MomentIndex(0, {1}));
  REQUIRE(t2 != nullptr);
  CHECK(t2 == t0);

  auto [init, c5] = layout.find(MeasureTag::Initial, MomentIndex(0, {1}));
  CHECK(init == nullptr);

  // Conjugated lookups share slots and flip the imaginary sign.
  const auto e = layout.expression(MeasureTag::Occupation, MomentIndex(1, {1, 2}));
  const auto f = layout.expression(MeasureTag::Occupation, MomentIndex(1, {-1, -2}));
  CHECK(e.re == f.re);
  REQUIRE(e.im.size() == 1);
  CHECK(e.im[0].slot == f.im[0].slot);
  CHECK(e.im[0].coef == -f.im[0].coef);

  // Slot count: one or two per canonical occupation index, same for l = 0 terminal.
  int expect = 0;
  for (const auto& idx : enumerate_moment_vector({2, 2, 2}))
    if (is_canonical(idx)) expect += is_self_conjugate(idx) ? 1 : 2;
  for (const auto& fr : multisets_up_to(2, 2)) {
    MomentIndex idx(0, fr);
    if (is_canonical(idx)) expect += is_self_conjugate(idx) ? 1 : 2;
  }
  CHECK(layout.num_vars() == expect);
  CHECK(VariableLayout({2, 2, 2}).slots() == layout.slots());
}

TEST_CASE("real embedding doubles the spectrum") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 7;
    const auto h = random_hermitian(rng, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(real_embedding(h));
    std::vector<double> want;
    for (int i = 0; i < n; ++i) want.insert(want.end(), 2, hs.eigenvalues()[i]);
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 2 * n; ++i) REQUIRE(std::abs(es.eigenvalues()[i] - want[i]) <= 1e-10);
  }
}

TEST_CASE("Hermitian PSD iff embedding PSD, 3x3 brute force") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  int psd = 0, indefinite = 0;
  for (int trial = 0; trial < 200; ++trial) {
    // Rank-deficient PSD or shifted indefinite.
    Eigen::MatrixXcd v(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) v(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd h = v * v.adjoint();
    if (trial % 2) h -= 0.5 * Eigen::MatrixXcd::Identity(3, 3) * h.trace().real() / 3.0;
    const bool hermitian_psd = hermitian_min_eigenvalue(h) >= -1e-12;
    const bool embedded_psd = min_eigenvalue(real_embedding(h)) >= -1e-12;
    REQUIRE(hermitian_psd == embedded_psd);
    (hermitian_psd ? psd : indefinite)++;
  }
  CHECK(psd > 0);
  CHECK(indefinite > 0);
}

TEST_CASE("embedded blocks evaluate to the real embedding of the Hermitian blocks") {
  InitialData u0{{{-2, Complex(0.3, -0.2)}, {-1, Complex(1.0, 0.5)}, {0, 0.7}, {1, Complex(1.0, -0.5)}, {2, Complex(0.3, 0.2)}}};
  const TruncationDegrees deg{4, 2, 2};
  const auto r = build_problem(LinearHeat{}, deg, u0);
  const auto t = analytic_tables(u0, deg);
  const auto x = embed_tables(r, t);
  for (std::size_t b = 0; b < r.block_specs.size(); ++b) {
    const auto h = hermitian_block(r.block_specs[b], t);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((evaluate_block(r.problem.blocks[b], x) - real_embedding(h)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(hermitian_min_eigenvalue(h) >= -1e-9);
  }
  CHECK(equality_residual(r.problem, x) <= 1e-10);
}

TEST_CASE("objective at analytic moments is the sum of the diagonals") {
  const auto u0 = InitialData::unit_low_modes();
  const TruncationDegrees deg{2, 2, 2};
  const auto r = build_problem(LinearHeat{}, deg, u0);
  const auto t = analytic_tables(u0, deg);
  double expect = 0.0;
  for (const auto& m : enumerate_matrix_basis(deg)) {
    std::vector<Frequency> f = m.freqs;
    for (Frequency n : m.freqs) f.push_back(-n);
    expect += analytic_occupation_moment(u0, MomentIndex(2 * m.time_half_degree, f)).real();
  }
  for (const auto& m : enumerate_basis(0, 1, 2)) {
    std::vector<Frequency> f = m.freqs;
    for (Frequency n : m.freqs) f.push_back(-n);
    expect += analytic_terminal_moment(u0, MomentIndex(0, f)).real();
  }
  const double obj = evaluate_objective(r.problem, embed_tables(r, t));
  CHECK(obj > 0.0);
  CHECK(std::abs(obj - expect) <= 1e-13);
}

TEST_CASE("pseudo-moment extraction") {
  const auto u0 = InitialData::unit_low_modes();
  const TruncationDegrees deg{2, 2, 2};
  const auto r = build_problem(LinearHeat{}, deg, u0);
  const auto t = analytic_tables(u0, deg);
  const auto x = embed_tables(r, t);
  const auto back = extract_pseudomoments(r, x);
  for (const auto& [idx, v] : t.occupation) CHECK(back.occupation.at(idx) == v);
  for (const auto& [idx, v] : t.terminal) CHECK(back.terminal.at(idx) == v);
  CHECK(embed_tables(r, back) == x);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> y(static_cast<std::size_t>(r.layout.num_vars()));
  for (auto& v : y) v = u(rng);
  const auto p = extract_pseudomoments(r, y);
  for (const auto& [idx, v] : p.occupation)
    if (is_self_conjugate(idx)) CHECK(v.imag() == 0.0);

  const std::vector<double> short_x(3, 0.0);
  CHECK_THROWS_AS(extract_pseudomoments(r, short_x), std::invalid_argument);
}

TEST_CASE("assembly is deterministic and rejects bad degrees") {
  const auto u0 = InitialData::unit_low_modes();
  const auto a = build_problem(LocalQuadratic{0.1}, {4, 2, 2}, u0).problem;
  const auto b = build_problem(LocalQuadratic{0.1}, {4, 2, 2}, u0).problem;
  CHECK(a.num_vars == b.num_vars);
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) CHECK(a.blocks[i].entries == b.blocks[i].entries);
  REQUIRE(a.equalities.size() == b.equalities.size());
  for (std::size_t i = 0; i < a.equalities.size(); ++i) {
    CHECK(a.equalities[i].terms == b.equalities[i].terms);
    CHECK(a.equalities[i].rhs == b.equalities[i].rhs);
  }
  CHECK(a.objective == b.objective);

  CHECK_THROWS_AS(build_problem(LinearHeat{}, {0, 2, 2}, u0), std::invalid_argument);
  CHECK_THROWS_AS(build_problem(LinearHeat{}, {2, 1, 2}, u0), std::invalid_argument);
}
