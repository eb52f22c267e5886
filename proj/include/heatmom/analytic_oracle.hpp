#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "heatmom/heat_models.hpp"
#include "heatmom/moment_index.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

// Closed form of int_0^1 t^l e^{-N t} dt:
//   l!/N^{l+1} - e^{-N} sum_{j=1}^{l+1} l! / (N^j (l-j+1)!)
// Loses accuracy to cancellation when N is small compared to l.
inline double time_integral_closed_form(int ell, double n) {
  if (ell < 0 || n <= 0.0) throw std::invalid_argument("closed form needs l >= 0 and N > 0");
  const double fact = std::tgamma(ell + 1.0);
  double sum = 0.0;
  for (int j = 1; j <= ell + 1; ++j) sum += fact / (std::pow(n, j) * std::tgamma(ell - j + 2.0));
  return fact / std::pow(n, ell + 1) - std::exp(-n) * sum;
}

// int_0^1 t^l e^{-N t} dt by 64-point Gauss-Legendre. Above N = 64 the
// integrand is too sharply peaked for a fixed rule and the closed form is
// used instead; there the e^{-N} tail is negligible and nothing cancels.
inline double time_integral(int ell, long long n) {
  if (ell < 0 || n < 1) throw std::invalid_argument("time_integral needs l >= 0 and N >= 1");
  const double nn = static_cast<double>(n);
  if (n > 64) return time_integral_closed_form(ell, nn);
  auto f = [ell, nn](double t) { return std::pow(t, ell) * std::exp(-nn * t); };
  return boost::math::quadrature::gauss<double, 64>::integrate(f, 0.0, 1.0);
}

inline Complex initial_product(const InitialData& u0, const MomentIndex& idx) {
  Complex p{1.0, 0.0};
  for (Frequency n : idx.freqs) p *= u0.coefficient(n);
  return p;
}

inline Complex analytic_occupation_moment(const InitialData& u0, const MomentIndex& idx) {
  const auto n2 = idx.squared_norm();
  const Complex p = initial_product(u0, idx);
  if (n2 == 0) return p / static_cast<double>(idx.time_degree + 1);
  if (p == Complex{}) return {};
  return p * time_integral(idx.time_degree, n2);
}

// Independent of l.
inline Complex analytic_terminal_moment(const InitialData& u0, const MomentIndex& idx) {
  const Complex p = initial_product(u0, idx);
  if (p == Complex{}) return {};
  return p * std::exp(-static_cast<double>(idx.squared_norm()));
}

// Exact moments of the linear heat flow from u0 for every index of the
// truncation (terminal moments stored for every l).
inline MeasureTables analytic_tables(const InitialData& u0, const TruncationDegrees& deg) {
  MeasureTables t;
  for (const auto& idx : enumerate_moment_vector(deg)) {
    if (!is_canonical(idx)) continue;
    t.initial.set(idx, initial_moment(u0, idx));
    t.terminal.set(idx, analytic_terminal_moment(u0, idx));
    t.occupation.set(idx, analytic_occupation_moment(u0, idx));
  }
  return t;
}

}  // namespace heatmom
