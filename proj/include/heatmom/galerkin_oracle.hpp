#pragma once

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "heatmom/heat_models.hpp"
#include "heatmom/moment_index.hpp"
#include "heatmom/moment_table.hpp"

namespace heatmom {

// Fourier modes u_n(t), |n| <= cutoff, stored at offset n + cutoff.
struct GalerkinState {
  int cutoff = 0;
  std::vector<Complex> modes;
  double time = 0.0;

  static GalerkinState from_initial(const InitialData& u0, int cutoff) {
    GalerkinState s;
    s.cutoff = cutoff;
    s.modes.assign(static_cast<std::size_t>(2 * cutoff + 1), Complex{});
    for (const auto& [n, c] : u0.coeffs) {
      if (std::abs(n) > cutoff)
        throw std::invalid_argument("initial mode " + std::to_string(n) + " beyond cutoff " +
                                    std::to_string(cutoff));
      s.modes[static_cast<std::size_t>(n + cutoff)] = c;
    }
    return s;
  }

  Complex mode(Frequency n) const {
    if (std::abs(n) > cutoff) return {};
    return modes[static_cast<std::size_t>(n + cutoff)];
  }

  // max_n |u_{-n} - conj(u_n)|
  double conjugate_asymmetry() const {
    double worst = 0.0;
    for (int n = 0; n <= cutoff; ++n) worst = std::max(worst, std::abs(mode(-n) - std::conj(mode(n))));
    return worst;
  }
};

// Galerkin right-hand side for mode vector `u` with the given cutoff.
inline void galerkin_rhs(const HeatModel& model, int cutoff, const std::vector<Complex>& u,
                         std::vector<Complex>& du) {
  const int size = 2 * cutoff + 1;
  du.resize(static_cast<std::size_t>(size));
  auto at = [&](int n) -> Complex {
    return std::abs(n) > cutoff ? Complex{} : u[static_cast<std::size_t>(n + cutoff)];
  };
  for (int n = -cutoff; n <= cutoff; ++n)
    du[static_cast<std::size_t>(n + cutoff)] = -static_cast<double>(n) * n * at(n);

  if (const auto* dist = std::get_if<DistributedQuadratic>(&model)) {
    if (dist->epsilon != 0.0)
      du[static_cast<std::size_t>(cutoff)] += dist->epsilon * (at(dist->m1) + at(-dist->m1)) *
                                              (at(dist->m2) + at(-dist->m2));
  } else if (const auto* loc = std::get_if<LocalQuadratic>(&model)) {
    if (loc->epsilon != 0.0) {
      for (int n = -cutoff; n <= cutoff; ++n) {
        Complex conv{};
        const int lo = std::max(-cutoff, n - cutoff);
        const int hi = std::min(cutoff, n + cutoff);
        for (int m = lo; m <= hi; ++m) conv += at(m) * at(n - m);
        du[static_cast<std::size_t>(n + cutoff)] += loc->epsilon * conv;
      }
    }
  }
}

inline std::vector<Complex> rhs(const HeatModel& model, const GalerkinState& state) {
  std::vector<Complex> du;
  galerkin_rhs(model, state.cutoff, state.modes, du);
  return du;
}

// States sampled at t = 0, step, 2 step, ..., 1.
struct Trajectory {
  double step = 0.0;
  int cutoff = 0;
  std::vector<GalerkinState> samples;

  const GalerkinState& terminal() const { return samples.back(); }
};

inline int steps_per_unit(double step) {
  if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("step must lie in (0, 1]");
  const double count = std::round(1.0 / step);
  if (std::abs(count * step - 1.0) > 1e-12)
    throw std::invalid_argument("step " + format_double(step) + " does not divide 1");
  return static_cast<int>(count);
}

// Classical fixed-step RK4 over [0, 1].
inline Trajectory integrate(const HeatModel& model, const InitialData& u0, double step, int cutoff) {
  const int count = steps_per_unit(step);
  const double h = 1.0 / count;
  using State = std::vector<Complex>;
  boost::numeric::odeint::runge_kutta4<State> stepper;
  auto system = [&](const State& u, State& du, double) { galerkin_rhs(model, cutoff, u, du); };

  Trajectory traj;
  traj.step = h;
  traj.cutoff = cutoff;
  traj.samples.reserve(static_cast<std::size_t>(count + 1));
  GalerkinState s = GalerkinState::from_initial(u0, cutoff);
  traj.samples.push_back(s);
  for (int i = 1; i <= count; ++i) {
    stepper.do_step(system, s.modes, s.time, h);
    s.time = static_cast<double>(i) / count;
    for (std::size_t j = 0; j < s.modes.size(); ++j)
      if (!std::isfinite(s.modes[j].real()) || !std::isfinite(s.modes[j].imag()))
        throw std::runtime_error("Galerkin state became nonfinite at t=" + format_double(s.time) +
                                 " in mode " + std::to_string(static_cast<int>(j) - cutoff));
    traj.samples.push_back(s);
  }
  return traj;
}

inline Complex mode_product(const GalerkinState& s, const std::vector<Frequency>& freqs) {
  Complex p{1.0, 0.0};
  for (Frequency n : freqs) p *= s.mode(n);
  return p;
}

// Occupation moments by composite Simpson in t of t^l prod u_{n_j}(t);
// terminal moments prod u_{n_j}(1) (for every l).
inline MeasureTables trajectory_moments(const Trajectory& traj, const TruncationDegrees& deg) {
  const auto intervals = traj.samples.size() - 1;
  if (traj.samples.size() < 3 || intervals % 2 != 0)
    throw std::invalid_argument("Simpson quadrature needs an even number of intervals");
  const double h = traj.step;

  std::vector<double> weights(traj.samples.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    weights[i] = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);

  MeasureTables out;
  std::vector<Complex> products(traj.samples.size());
  for (const auto& freqs : multisets_up_to(deg.algebraic, deg.harmonic)) {
    if (!is_canonical(MomentIndex(0, freqs))) continue;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) products[i] = mode_product(traj.samples[i], freqs);
    for (int ell = 0; ell <= deg.time; ++ell) {
      Complex sum{};
      for (std::size_t i = 0; i < products.size(); ++i)
        sum += weights[i] * std::pow(traj.samples[i].time, ell) * products[i];
      MomentIndex idx(ell, freqs);
      out.occupation.set(idx, sum * (h / 3.0));
      out.terminal.set(idx, products.back());
      out.initial.set(idx, ell == 0 ? products.front() : Complex{});
    }
  }
  return out;
}

// CSV: t, then re/im of every mode from -cutoff to cutoff.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (int n = -traj.cutoff; n <= traj.cutoff; ++n) os << ",re_u" << n << ",im_u" << n;
  os << '\n';
  for (const auto& s : traj.samples) {
    os << format_double(s.time);
    for (const auto& c : s.modes) os << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    os << '\n';
  }
}

}  // namespace heatmom
