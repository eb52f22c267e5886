#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "heatmom/conic_problem.hpp"

namespace heatmom {

struct SolverSettings {
  int max_iters = 50000;
  double abs_tol = 1e-7;
  double rel_tol = 1e-6;
  double penalty = 1.0;       // ADMM penalty rho (initial value when adaptive)
  bool scaling = true;        // per-block and cost equilibration
  double relaxation = 1.6;    // over-relaxation factor in (0, 2)
  bool adaptive_penalty = true;
  bool polish = true;         // zero-row polishing after convergence
  double polish_zero_tol = 1e-5;
  int check_every = 10;
  bool record_history = false;
};

enum class SolveStatus { Optimal, MaxIters, InfeasibleSuspect };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIters: return "max_iters";
    default: return "infeasible_suspect";
  }
}

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  double primal_objective = 0.0;
  double max_equality_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;  // ||X(x) - Z|| at termination
  double dual_residual = 0.0;
  double penalty = 0.0;          // final rho
  bool polished = false;
  double seconds = 0.0;
  std::string message;
  // Per iteration: sqrt(||z_k - z_{k-1}||^2 + ||u_k - u_{k-1}||^2).
  std::vector<double> history;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

// Euclidean projection onto the PSD cone: clamp negative eigenvalues.
inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

namespace detail {

// Scaled symmetric vectorization: upper triangle, column by column, with
// off-diagonals times sqrt(2) so that inner products are preserved.
struct SvecLayout {
  std::vector<int> sizes;
  std::vector<int> offsets;
  int total = 0;

  explicit SvecLayout(const ConicProblem& p) {
    for (const auto& b : p.blocks) {
      sizes.push_back(b.size);
      offsets.push_back(total);
      total += b.size * (b.size + 1) / 2;
    }
  }

  int index(std::size_t block, int row, int col) const {
    if (row > col) std::swap(row, col);
    return offsets[block] + col * (col + 1) / 2 + row;
  }

  int dim(std::size_t block) const { return sizes[block] * (sizes[block] + 1) / 2; }
};

inline Eigen::MatrixXd unpack(const SvecLayout& L, std::size_t b, const Eigen::VectorXd& v) {
  const int n = L.sizes[b];
  Eigen::MatrixXd m(n, n);
  const double inv = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double val = v[L.index(b, i, j)] * (i == j ? 1.0 : inv);
      m(i, j) = val;
      m(j, i) = val;
    }
  return m;
}

inline void pack(const SvecLayout& L, std::size_t b, const Eigen::MatrixXd& m, Eigen::VectorXd& v) {
  const int n = L.sizes[b];
  const double s2 = std::sqrt(2.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) v[L.index(b, i, j)] = m(i, j) * (i == j ? 1.0 : s2);
}

class AdmmSolver {
 public:
  AdmmSolver(const ConicProblem& p, const SolverSettings& s) : p_(p), s_(s), svec_(p) {}

  SolveResult run() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    check_well_formed(p_);
    const int n = p_.num_vars;

    if (!eliminate_equalities()) {
      res.x.assign(x0_.data(), x0_.data() + n);
      finish(res, SolveStatus::InfeasibleSuspect, "equality constraints are inconsistent");
      res.report.seconds = elapsed(start);
      return res;
    }
    assemble_operator();
    iterate(res);
    res.report.seconds = elapsed(start);
    return res;
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  // x = x0 + Z w parametrizes {x : A x = b}; Z has orthonormal columns.
  bool eliminate_equalities() {
    const int n = p_.num_vars;
    const int m = static_cast<int>(p_.equalities.size());
    if (m == 0) {
      x0_ = Eigen::VectorXd::Zero(n);
      z_basis_ = Eigen::MatrixXd::Identity(n, n);
      return true;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      for (const auto& t : p_.equalities[r].terms) a(r, t.slot) += t.coef;
      b[r] = p_.equalities[r].rhs;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    qr.setThreshold(1e-11);
    const auto rank = qr.rank();
    Eigen::MatrixXd q = qr.householderQ();
    z_basis_ = q.rightCols(n - rank);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-11);
    x0_ = cod.solve(b);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return (a * x0_ - b).cwiseAbs().maxCoeff() <= 1e-8 * scale;
  }

  void assemble_operator() {
    const int n = p_.num_vars;
    std::vector<Eigen::Triplet<double>> trips;
    const double s2 = std::sqrt(2.0);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b)
      for (const auto& e : p_.blocks[b].entries)
        trips.emplace_back(svec_.index(b, e.row, e.col), e.slot, e.coef * (e.row == e.col ? 1.0 : s2));
    g_.resize(svec_.total, n);
    g_.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (const auto& t : p_.objective) c[t.slot] += t.coef;

    m_ = g_ * z_basis_;
    g0_ = g_ * x0_;
    cw_ = z_basis_.transpose() * c;

    block_scale_.assign(p_.blocks.size(), 1.0);
    cost_scale_ = 1.0;
    if (s_.scaling) {
      for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
        const int off = svec_.offsets[b], dim = svec_.dim(b);
        const double rms = std::sqrt(m_.middleRows(off, dim).squaredNorm() / std::max(1, dim));
        if (rms > 0.0) block_scale_[b] = std::clamp(1.0 / rms, 1e-4, 1e4);
      }
      const double cmax = cw_.size() ? cw_.cwiseAbs().maxCoeff() : 0.0;
      cost_scale_ = 1.0 / std::max(1.0, cmax);
    }
    row_scale_.resize(svec_.total);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b)
      row_scale_.segment(svec_.offsets[b], svec_.dim(b)).setConstant(block_scale_[b]);
    ms_ = row_scale_.asDiagonal() * m_;
    g0s_ = row_scale_.cwiseProduct(g0_);

    Eigen::MatrixXd h = ms_.transpose() * ms_;
    if (h.size() > 0) h.diagonal().array() += 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
    llt_.compute(h);
  }

  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(v.size());
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) pack(svec_, b, project_psd(unpack(svec_, b, v)), out);
    return out;
  }

  std::vector<double> to_x(const Eigen::VectorXd& w) const {
    Eigen::VectorXd x = x0_ + z_basis_ * w;
    return {x.data(), x.data() + x.size()};
  }

  void iterate(SolveResult& res) {
    const int q = static_cast<int>(z_basis_.cols());
    auto& rep = res.report;
    double rho = s_.penalty;
    const double alpha = s_.relaxation;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(svec_.total);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(svec_.total);
    Eigen::VectorXd gx(svec_.total), z_old(svec_.total), u_old(svec_.total);
    const Eigen::VectorXd cws = cost_scale_ * cw_;
    const Eigen::VectorXd inv_scale = row_scale_.cwiseInverse();

    bool converged = false;
    int k = 0;
    double r_prim = 0.0, r_dual = 0.0;
    for (k = 1; k <= s_.max_iters; ++k) {
      if (q > 0) {
        Eigen::VectorXd rhs = ms_.transpose() * (z - u - g0s_) - cws / rho;
        w = llt_.solve(rhs);
      }
      gx = g0s_ + ms_ * w;
      const Eigen::VectorXd gx_hat = alpha * gx + (1.0 - alpha) * z;
      z_old = z;
      u_old = u;
      z = project(gx_hat + u);
      u += gx_hat - z;
      if (s_.record_history) rep.history.push_back(std::sqrt((z - z_old).squaredNorm() + (u - u_old).squaredNorm()));

      if (k % s_.check_every != 0 && k != s_.max_iters) continue;
      const Eigen::VectorXd gx_u = inv_scale.cwiseProduct(gx);
      const Eigen::VectorXd z_u = inv_scale.cwiseProduct(z);
      r_prim = (gx_u - z_u).cwiseAbs().maxCoeff();
      const Eigen::VectorXd dual_step = ms_.transpose() * (z - z_old);
      r_dual = q > 0 ? rho * dual_step.cwiseAbs().maxCoeff() / cost_scale_ : 0.0;
      const double eps_p = s_.abs_tol + s_.rel_tol * std::max(gx_u.cwiseAbs().maxCoeff(), z_u.cwiseAbs().maxCoeff());
      const Eigen::VectorXd mu = ms_.transpose() * u;
      const double dual_scale = q > 0 ? rho * mu.cwiseAbs().maxCoeff() / cost_scale_ : 0.0;
      const double eps_d = s_.abs_tol + s_.rel_tol * dual_scale;
      if (r_prim <= eps_p && r_dual <= eps_d) {
        const auto x = to_x(w);
        if (min_block_eigenvalue(p_, x) >= -s_.abs_tol) {
          converged = true;
          break;
        }
      }
      if (s_.adaptive_penalty && k % 50 == 0 && r_prim > 0.0 && r_dual > 0.0) {
        const double prim_rel = r_prim / std::max(1e-30, std::max(gx_u.cwiseAbs().maxCoeff(), z_u.cwiseAbs().maxCoeff()));
        const double dual_rel = r_dual / std::max(1e-30, dual_scale);
        const double factor = std::sqrt(prim_rel / std::max(1e-30, dual_rel));
        if (factor > 5.0 || factor < 0.2) {
          const double new_rho = std::clamp(rho * factor, 1e-6, 1e6);
          u *= rho / new_rho;
          rho = new_rho;
        }
      }
    }
    rep.iterations = std::min(k, s_.max_iters);
    rep.primal_residual = r_prim;
    rep.dual_residual = r_dual;
    rep.penalty = rho;
    res.x = to_x(w);

    if (s_.polish) polish(res, w);

    if (converged) {
      finish(res, SolveStatus::Optimal, "converged");
      // Polishing keeps residuals within tolerance; re-check to be safe.
      if (res.report.max_equality_residual > s_.abs_tol || res.report.min_block_eigenvalue < -s_.abs_tol)
        res.report.status = SolveStatus::MaxIters;
    } else {
      const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
      const bool far = r_prim > 1e-3 * scale;
      finish(res, far ? SolveStatus::InfeasibleSuspect : SolveStatus::MaxIters,
             far ? "primal residual stalled far from zero" : "iteration limit reached");
    }
  }

  // Rows of a PSD block whose diagonal vanishes must vanish entirely.
  // Imposes those rows as equalities and projects the iterate onto them,
  // which turns numerically small moments into exact zeros.
  void polish(SolveResult& res, const Eigen::VectorXd& w) {
    const auto& x = res.x;
    std::vector<std::vector<SlotTerm>> rows;
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& blk = p_.blocks[b];
      const Eigen::MatrixXd xm = evaluate_block(blk, x);
      const double thr = s_.polish_zero_tol * std::max(1.0, xm.diagonal().maxCoeff());
      std::vector<bool> zero(static_cast<std::size_t>(blk.size), false);
      bool any = false;
      for (int i = 0; i < blk.size; ++i)
        if (xm(i, i) <= thr) zero[i] = any = true;
      if (!any) continue;
      std::map<std::pair<int, int>, std::vector<SlotTerm>> expr;
      for (const auto& e : blk.entries)
        if (zero[e.row] || zero[e.col]) expr[{e.row, e.col}].push_back({e.slot, e.coef});
      for (auto& [rc, terms] : expr) {
        auto merged = merge_terms(terms);
        if (!merged.empty()) rows.push_back(std::move(merged));
      }
    }
    if (rows.empty()) return;
    std::ranges::sort(rows, [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                          [](const SlotTerm& l, const SlotTerm& r) {
                                            return std::pair(l.slot, l.coef) < std::pair(r.slot, r.coef);
                                          });
    });
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

    const int n = p_.num_vars;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& t : rows[r]) k(static_cast<Eigen::Index>(r), t.slot) = t.coef;
    const Eigen::MatrixXd kz = k * z_basis_;
    const Eigen::VectorXd target = -(k * x0_);
    Eigen::VectorXd wp = w;
    if (kz.cols() > 0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kz);
      wp = w - cod.solve(kz * w - target);
    }
    Eigen::VectorXd xp = x0_ + z_basis_ * wp;
    const double xscale = std::max(1.0, xp.cwiseAbs().maxCoeff());
    if ((k * xp).cwiseAbs().maxCoeff() > 1e-9 * xscale) return;  // face inconsistent with equalities
    for (const auto& row : rows)
      if (row.size() == 1) xp[row.front().slot] = 0.0;

    std::vector<double> cand(xp.data(), xp.data() + n);
    const double obj_old = evaluate_objective(p_, x);
    const double obj_new = evaluate_objective(p_, cand);
    // Accept whenever nothing gets materially worse; an unconverged iterate
    // still benefits from exact zeros.
    if (equality_residual(p_, cand) > std::max(s_.abs_tol, 10.0 * equality_residual(p_, x))) return;
    if (min_block_eigenvalue(p_, cand) < std::min(-s_.abs_tol, min_block_eigenvalue(p_, x)) - s_.abs_tol) return;
    if (obj_new > obj_old + 10.0 * s_.rel_tol * std::max(1.0, std::abs(obj_old))) return;
    res.x = std::move(cand);
    res.report.polished = true;
  }

  void finish(SolveResult& res, SolveStatus status, std::string msg) const {
    auto& rep = res.report;
    rep.status = status;
    rep.message = std::move(msg);
    rep.primal_objective = evaluate_objective(p_, res.x);
    rep.max_equality_residual = equality_residual(p_, res.x);
    rep.min_block_eigenvalue = min_block_eigenvalue(p_, res.x);
  }

  const ConicProblem& p_;
  SolverSettings s_;
  SvecLayout svec_;
  Eigen::VectorXd x0_;
  Eigen::MatrixXd z_basis_;
  Eigen::SparseMatrix<double> g_;
  Eigen::MatrixXd m_, ms_;
  Eigen::VectorXd g0_, g0s_, cw_, row_scale_;
  std::vector<double> block_scale_;
  double cost_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace detail

// Operator-splitting (ADMM) solver for the conic problem. Equalities are
// eliminated exactly through a nullspace basis; the iteration alternates a
// least-squares step on the remaining variables with blockwise PSD
// projections.
inline SolveResult solve(const ConicProblem& problem, const SolverSettings& settings = {}) {
  if (!(settings.abs_tol > 0.0) || !(settings.rel_tol > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (!(settings.penalty > 0.0)) throw std::invalid_argument("solver penalty must be positive");
  if (!(settings.relaxation > 0.0 && settings.relaxation < 2.0))
    throw std::invalid_argument("relaxation factor must lie in (0, 2)");
  if (settings.max_iters < 1 || settings.check_every < 1)
    throw std::invalid_argument("iteration counts must be positive");
  return detail::AdmmSolver(problem, settings).run();
}

}  // namespace heatmom
