#pragma once

#include <utility>

#include "epd/dual.hpp"
#include "epd/solvers.hpp"
#include "epd/types.hpp"

namespace epd {

enum class InnerSolver { Lbfgs, NewtonCg };

template <typename Scalar>
struct PpaOptions {
  InnerSolver solver = InnerSolver::NewtonCg;
  Scalar grad_tol = Scalar(1e-6);
  int max_iter = 50;
  NewtonCgParams<Scalar> newton{};  // grad_tol / max_iter are overridden by the two above
  LbfgsParams<Scalar> lbfgs{};
};

template <typename Scalar>
struct PpaStepResult {
  DenseVector<Scalar> x;
  DenseVector<Scalar> y;
  DenseVector<Scalar> u;
  SolveStats<Scalar> inner;
};

/// One partial proximal-point step for
///   min <v, |x|> + (beta/2) ||u||^2 + (1/(2 lambda)) ||x - x_anchor||^2
///   s.t. A x + u = b.
/// The dual Phi is minimized from y_warm with the chosen inner solver, then
/// the primal pair is recovered:
///   x = shrink(x_anchor - lambda A^T y, v, lambda),  u = -y / beta.
/// Feasibility of the recovered pair satisfies ||A x + u - b|| = ||grad Phi(y)||.
template <typename Scalar>
PpaStepResult<Scalar> ppa_step(const LinearOperator<Scalar>& op, const VectorArg<Scalar>& b,
                               Scalar beta, Scalar lambda, const VectorArg<Scalar>& x_anchor,
                               const VectorArg<Scalar>& v, const VectorArg<Scalar>& y_warm,
                               const PpaOptions<Scalar>& options) {
  DualContext<Scalar> ctx{&op, b, beta, lambda, x_anchor, v};
  PpaStepResult<Scalar> out;
  if (options.solver == InnerSolver::NewtonCg) {
    NewtonCgParams<Scalar> p = options.newton;
    p.grad_tol = options.grad_tol;
    p.max_iter = options.max_iter;
    auto [y, stats] = newton_cg(ctx, y_warm, p);
    out.y = std::move(y);
    out.inner = std::move(stats);
  } else {
    LbfgsParams<Scalar> p = options.lbfgs;
    p.grad_tol = options.grad_tol;
    p.max_iter = options.max_iter;
    auto [y, stats] = lbfgs(ctx, y_warm, p);
    out.y = std::move(y);
    out.inner = std::move(stats);
  }
  out.x = shrink<Scalar>(x_anchor - lambda * apply_adjoint(op, out.y), v, lambda);
  out.u = -out.y / beta;
  return out;
}

}  // namespace epd
