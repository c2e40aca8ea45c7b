#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "epd/dual.hpp"
#include "epd/types.hpp"

namespace epd {

// ---------------------------------------------------------------------------
// Conjugate gradients on an SPD operator, from a zero initial guess.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct CgResult {
  DenseVector<Scalar> x;
  int iterations = 0;
  bool converged = false;
  bool negative_curvature = false;
};

/// Solves M x = rhs for SPD M given as a callable. Stops when the residual
/// drops below rel_tol * ||rhs||. If a direction of nonpositive curvature is
/// met the current iterate is returned with the flag set.
template <typename Scalar, typename ApplyFn>
CgResult<Scalar> cg_solve(ApplyFn&& apply_m, const DenseVector<Scalar>& rhs, Scalar rel_tol,
                          int max_iter) {
  CgResult<Scalar> out;
  out.x = DenseVector<Scalar>::Zero(rhs.size());
  const Scalar rhs_norm = rhs.norm();
  if (rhs_norm == Scalar(0)) {
    out.converged = true;
    return out;
  }
  DenseVector<Scalar> r = rhs;
  DenseVector<Scalar> p = r;
  Scalar rr = r.squaredNorm();
  const Scalar stop = rel_tol * rhs_norm;
  for (int it = 0; it < max_iter; ++it) {
    const DenseVector<Scalar> mp = apply_m(p);
    const Scalar pmp = p.dot(mp);
    if (pmp <= Scalar(0)) {
      out.negative_curvature = true;
      return out;
    }
    const Scalar alpha = rr / pmp;
    out.x += alpha * p;
    r -= alpha * mp;
    ++out.iterations;
    const Scalar rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= stop) {
      out.converged = true;
      return out;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared reporting for the dual minimizers.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct IterRecord {
  Scalar grad_norm = 0;     // at the iterate the step started from
  Scalar phi_before = 0;
  Scalar phi_after = 0;
  Scalar dir_deriv = 0;     // <grad, d> used in the acceptance test
  Scalar step = 0;
  int cg_iterations = 0;    // Newton only
};

template <typename Scalar>
struct SolveStats {
  int iterations = 0;
  Scalar grad_norm = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar objective = std::numeric_limits<Scalar>::quiet_NaN();
  bool converged = false;
  bool stagnated = false;
  bool stalled = false;          // L-BFGS stall rule
  int grad_evals = 0;            // fused phi/grad/mask evaluations (2 applications each)
  int phi_evals = 0;             // line-search objective evaluations (1 application each)
  int cg_iterations = 0;         // total inner CG iterations (2 applications each)
  int skipped_pairs = 0;         // L-BFGS curvature pairs rejected
  std::uint64_t nmat = 0;        // operator applications consumed by this solve
  std::vector<IterRecord<Scalar>> trace;
};

// ---------------------------------------------------------------------------
// Semismooth Newton with CG inner solves.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct NewtonCgParams {
  Scalar grad_tol = Scalar(1e-6);     // gradient norm target
  int max_iter = 50;
  Scalar tau1 = Scalar(0.1);          // regularization eps_j = tau1 * min(tau2, ||grad||)
  Scalar tau2 = Scalar(1e-4);
  Scalar backtrack = Scalar(0.5);     // line-search step contraction
  Scalar armijo = Scalar(1e-4);       // sufficient-decrease constant
  Scalar cg_tol = Scalar(-1);         // <= 0: adaptive min(0.1, sqrt(||grad||))
  int cg_max = -1;                    // <= 0: number of rows
  int max_backtracks = 50;
  bool record_trace = false;
};

/// Minimizes Phi by the regularized semismooth Newton iteration: solve
/// (V + eps_j I) d = -grad with CG, then backtrack until
///   Phi(y + t d) <= Phi(y) + armijo * t * <grad, d>.
/// A failed line search falls back to steepest descent once; a second failure
/// returns with the stagnation flag set.
template <typename Scalar>
std::pair<DenseVector<Scalar>, SolveStats<Scalar>> newton_cg(const DualContext<Scalar>& ctx,
                                                             const VectorArg<Scalar>& y0,
                                                             const NewtonCgParams<Scalar>& params) {
  using Vector = DenseVector<Scalar>;
  SolveStats<Scalar> stats;
  const std::uint64_t nmat0 = ctx.op->counter().nmat();
  const int cg_cap = params.cg_max > 0 ? params.cg_max : static_cast<int>(ctx.op->rows());

  Vector y = y0;
  DualEval<Scalar> cur = eval_phi_grad_mask(ctx, y);
  ++stats.grad_evals;
  bool fell_back_last_iter = false;

  while (true) {
    const Scalar gnorm = cur.grad.norm();
    stats.grad_norm = gnorm;
    stats.objective = cur.phi;
    if (gnorm <= params.grad_tol) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= params.max_iter) break;

    const Scalar eps_reg = params.tau1 * std::min(params.tau2, gnorm);
    const Scalar cg_tol =
        params.cg_tol > Scalar(0) ? params.cg_tol : std::min(Scalar(0.1), std::sqrt(gnorm));
    auto hess = [&](const Vector& d) {
      return hessian_apply<Scalar>(ctx, cur.mask, eps_reg, d);
    };
    CgResult<Scalar> cg = cg_solve<Scalar>(hess, Vector(-cur.grad), cg_tol, cg_cap);
    stats.cg_iterations += cg.iterations;

    Vector d = std::move(cg.x);
    Scalar gd = cur.grad.dot(d);
    if (!(gd < Scalar(0))) {  // zero or ascent direction from a truncated solve
      d = -cur.grad;
      gd = -gnorm * gnorm;
    }

    // backtracking line search on the Armijo condition
    auto search = [&](const Vector& dir, Scalar dir_deriv)
        -> std::optional<std::pair<Scalar, Scalar>> {
      Scalar t = Scalar(1);
      for (int l = 0; l < params.max_backtracks; ++l) {
        const Scalar trial = phi<Scalar>(ctx, y + t * dir);
        ++stats.phi_evals;
        if (trial <= cur.phi + params.armijo * t * dir_deriv) return std::make_pair(t, trial);
        t *= params.backtrack;
      }
      return std::nullopt;
    };

    auto accepted = search(d, gd);
    bool fell_back = false;
    if (!accepted && !fell_back_last_iter) {
      // retry once along steepest descent; only a failure on the very next
      // iteration counts as the failure recurring
      fell_back = true;
      d = -cur.grad;
      gd = -gnorm * gnorm;
      accepted = search(d, gd);
    }
    if (!accepted) {
      stats.stagnated = true;
      break;
    }
    fell_back_last_iter = fell_back;

    const auto [step, phi_after] = *accepted;
    y += step * d;
    ++stats.iterations;
    if (params.record_trace)
      stats.trace.push_back({gnorm, cur.phi, phi_after, gd, step, cg.iterations});
    cur = eval_phi_grad_mask(ctx, y);
    ++stats.grad_evals;
  }

  stats.nmat = ctx.op->counter().nmat() - nmat0;
  return {std::move(y), std::move(stats)};
}

// ---------------------------------------------------------------------------
// Limited-memory BFGS with a nonmonotone Armijo line search.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct LbfgsParams {
  Scalar grad_tol = Scalar(1e-5);
  int max_iter = 300;
  int memory = 5;
  Scalar armijo = Scalar(1e-4);
  Scalar backtrack = Scalar(0.5);
  int nonmonotone_window = 10;   // reference value = max Phi over this many accepted iterates
  int max_backtracks = 50;
  int stall_window = 10;         // <= 0 disables the early-exit heuristic
  Scalar stall_ratio = Scalar(0.01);
  Scalar curvature_skip = Scalar(1e-12);  // reject pairs with <s,dg> <= skip*||s||*||dg||
  bool record_trace = false;
};

template <typename Scalar>
std::pair<DenseVector<Scalar>, SolveStats<Scalar>> lbfgs(const DualContext<Scalar>& ctx,
                                                         const VectorArg<Scalar>& y0,
                                                         const LbfgsParams<Scalar>& params) {
  using Vector = DenseVector<Scalar>;
  SolveStats<Scalar> stats;
  const std::uint64_t nmat0 = ctx.op->counter().nmat();

  Vector y = y0;
  DualEval<Scalar> cur = eval_phi_grad_mask(ctx, y);
  ++stats.grad_evals;

  std::deque<Vector> s_hist, dg_hist;
  std::deque<Scalar> rho_hist;
  std::deque<Scalar> phi_window{cur.phi};
  std::vector<Scalar> grad_norms{cur.grad.norm()};
  bool fell_back_last_iter = false;

  while (true) {
    const Scalar gnorm = cur.grad.norm();
    stats.grad_norm = gnorm;
    stats.objective = cur.phi;
    if (gnorm <= params.grad_tol) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= params.max_iter) break;

    // stall rule: best gradient norm of the last window must improve on the
    // best seen before that window by at least stall_ratio, relatively
    if (params.stall_window > 0 &&
        static_cast<int>(grad_norms.size()) > params.stall_window) {
      const std::size_t cut = grad_norms.size() - static_cast<std::size_t>(params.stall_window);
      Scalar best_recent = grad_norms[cut];
      for (std::size_t i = cut; i < grad_norms.size(); ++i)
        best_recent = std::min(best_recent, grad_norms[i]);
      Scalar best_before = grad_norms[0];
      for (std::size_t i = 0; i < cut; ++i) best_before = std::min(best_before, grad_norms[i]);
      if (best_recent > (Scalar(1) - params.stall_ratio) * best_before) {
        stats.stalled = true;
        break;
      }
    }

    // two-loop recursion
    Vector d = -cur.grad;
    const std::size_t pairs = s_hist.size();
    if (pairs > 0) {
      std::vector<Scalar> alpha(pairs);
      for (std::size_t i = pairs; i-- > 0;) {
        alpha[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= alpha[i] * dg_hist[i];
      }
      const Scalar h0 = s_hist.back().dot(dg_hist.back()) / dg_hist.back().squaredNorm();
      d *= h0;
      for (std::size_t i = 0; i < pairs; ++i) {
        const Scalar beta = rho_hist[i] * dg_hist[i].dot(d);
        d += (alpha[i] - beta) * s_hist[i];
      }
    }

    Scalar gd = cur.grad.dot(d);
    if (!(gd < -params.curvature_skip * gnorm * d.norm())) {
      d = -cur.grad;
      gd = -gnorm * gnorm;
    }

    Scalar f_ref = phi_window.front();
    for (const Scalar f : phi_window) f_ref = std::max(f_ref, f);

    auto search = [&](const Vector& dir, Scalar dir_deriv)
        -> std::optional<std::pair<Scalar, Scalar>> {
      Scalar t = Scalar(1);
      for (int l = 0; l < params.max_backtracks; ++l) {
        const Scalar trial = phi<Scalar>(ctx, y + t * dir);
        ++stats.phi_evals;
        if (trial <= f_ref + params.armijo * t * dir_deriv) return std::make_pair(t, trial);
        t *= params.backtrack;
      }
      return std::nullopt;
    };

    auto accepted = search(d, gd);
    bool fell_back = false;
    if (!accepted && !fell_back_last_iter) {
      // A barely admissible curvature pair can produce a quasi-Newton
      // direction so long that every backtracked step overshoots. The stored
      // pairs are what built that direction, so they carry no trustworthy
      // curvature: drop them and retry once along steepest descent. Only a
      // failure on the very next iteration counts as the failure recurring.
      fell_back = true;
      s_hist.clear();
      dg_hist.clear();
      rho_hist.clear();
      d = -cur.grad;
      gd = -gnorm * gnorm;
      accepted = search(d, gd);
    }
    if (!accepted) {
      stats.stagnated = true;
      break;
    }
    fell_back_last_iter = fell_back;

    const auto [step, phi_after] = *accepted;
    const Vector y_next = y + step * d;
    DualEval<Scalar> next = eval_phi_grad_mask(ctx, y_next);
    ++stats.grad_evals;

    const Vector s = y_next - y;
    const Vector dg = next.grad - cur.grad;
    const Scalar sy = s.dot(dg);
    if (sy > params.curvature_skip * s.norm() * dg.norm()) {
      s_hist.push_back(s);
      dg_hist.push_back(dg);
      rho_hist.push_back(Scalar(1) / sy);
      if (static_cast<int>(s_hist.size()) > params.memory) {
        s_hist.pop_front();
        dg_hist.pop_front();
        rho_hist.pop_front();
      }
    } else {
      ++stats.skipped_pairs;
    }

    if (params.record_trace)
      stats.trace.push_back({gnorm, cur.phi, phi_after, gd, step, 0});

    y = y_next;
    cur = std::move(next);
    ++stats.iterations;
    phi_window.push_back(cur.phi);
    if (static_cast<int>(phi_window.size()) > params.nonmonotone_window) phi_window.pop_front();
    grad_norms.push_back(cur.grad.norm());
  }

  stats.nmat = ctx.op->counter().nmat() - nmat0;
  return {std::move(y), std::move(stats)};
}

}  // namespace epd
