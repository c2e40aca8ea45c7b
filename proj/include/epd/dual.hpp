#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "epd/linop.hpp"
#include "epd/shrinkage.hpp"
#include "epd/types.hpp"

namespace epd {

/// One proximal subproblem seen from the dual side. For weights v, penalty
/// beta on the residual slack, prox parameter lambda and anchor x_anchor, the
/// dual objective is
///   Phi(y) = <b, y> + ||y||^2 / (2 beta)
///            + || shrink(x_anchor - lambda A^T y, v, lambda) ||^2 / (2 lambda),
/// a convex C^1 function whose gradient is
///   grad Phi(y) = b + y / beta - A shrink(x_anchor - lambda A^T y, v, lambda).
/// The primal pair is recovered from an approximate root y via
///   x = shrink(x_anchor - lambda A^T y, v, lambda),  u = -y / beta,
/// and || A x + u - b || equals || grad Phi(y) || exactly.
///
/// `op` is non-owning; the operator must outlive the context.
template <typename Scalar>
struct DualContext {
  const LinearOperator<Scalar>* op = nullptr;
  DenseVector<Scalar> b;
  Scalar beta = 1;
  Scalar lambda = 1;
  DenseVector<Scalar> x_anchor;
  DenseVector<Scalar> v;
};

namespace detail {

template <typename Scalar>
void check_context(const DualContext<Scalar>& ctx) {
  if (ctx.op == nullptr) throw std::invalid_argument("DualContext: missing operator");
  if (ctx.b.size() != ctx.op->rows() || ctx.x_anchor.size() != ctx.op->cols() ||
      ctx.v.size() != ctx.op->cols())
    throw std::invalid_argument("DualContext: size mismatch");
  if (!(ctx.beta > Scalar(0)) || !(ctx.lambda > Scalar(0)))
    throw std::invalid_argument("DualContext: beta and lambda must be positive");
}

template <typename Scalar>
Scalar phi_from_pieces(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& y,
                       const DenseVector<Scalar>& shrunk) {
  return ctx.b.dot(y) + y.squaredNorm() / (2 * ctx.beta) +
         shrunk.squaredNorm() / (2 * ctx.lambda);
}

}  // namespace detail

/// Phi, gradient and generalized-Jacobian mask at y in one pass, sharing a
/// single adjoint and a single forward application. Solvers use this fused
/// evaluation; the three standalone functions below are the one-off API.
template <typename Scalar>
struct DualEval {
  Scalar phi = 0;
  DenseVector<Scalar> grad;
  DenseVector<Scalar> mask;  // d_i = 1 iff |z_i| >= lambda * v_i (ties -> 1)
};

template <typename Scalar>
DenseVector<Scalar> mask_from_z(const DualContext<Scalar>& ctx, const DenseVector<Scalar>& z) {
  DenseVector<Scalar> d(z.size());
  for (Index i = 0; i < z.size(); ++i)
    d[i] = std::abs(z[i]) >= ctx.lambda * ctx.v[i] ? Scalar(1) : Scalar(0);
  return d;
}

template <typename Scalar>
DualEval<Scalar> eval_phi_grad_mask(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& y) {
  detail::check_context(ctx);
  const DenseVector<Scalar> z = ctx.x_anchor - ctx.lambda * apply_adjoint(*ctx.op, y);
  const DenseVector<Scalar> shrunk = shrink<Scalar>(z, ctx.v, ctx.lambda);
  DualEval<Scalar> out;
  out.phi = detail::phi_from_pieces(ctx, y, shrunk);
  out.grad = ctx.b + y / ctx.beta - apply(*ctx.op, shrunk);
  out.mask = mask_from_z(ctx, z);
  return out;
}

/// Phi only: one adjoint application. If z_out is non-null the pre-shrink
/// point z = x_anchor - lambda A^T y is stored there.
template <typename Scalar>
Scalar phi(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& y,
           DenseVector<Scalar>* z_out = nullptr) {
  detail::check_context(ctx);
  DenseVector<Scalar> z = ctx.x_anchor - ctx.lambda * apply_adjoint(*ctx.op, y);
  const DenseVector<Scalar> shrunk = shrink<Scalar>(z, ctx.v, ctx.lambda);
  if (z_out != nullptr) *z_out = std::move(z);
  return detail::phi_from_pieces(ctx, y, shrunk);
}

/// Gradient: exactly one forward and one adjoint application.
template <typename Scalar>
DenseVector<Scalar> grad_phi(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& y) {
  detail::check_context(ctx);
  const DenseVector<Scalar> z = ctx.x_anchor - ctx.lambda * apply_adjoint(*ctx.op, y);
  const DenseVector<Scalar> shrunk = shrink<Scalar>(z, ctx.v, ctx.lambda);
  return ctx.b + y / ctx.beta - apply(*ctx.op, shrunk);
}

/// 0/1 mask selecting the active element of the generalized Jacobian:
/// d_i = 1 iff |z_i| >= lambda v_i. At kinks the 1 branch is chosen, and
/// v_i = 0 always yields 1, so V = beta^{-1} I + lambda A D A^T stays the
/// exact Hessian wherever Phi is twice differentiable.
template <typename Scalar>
DenseVector<Scalar> jacobian_mask(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& y) {
  detail::check_context(ctx);
  const DenseVector<Scalar> z = ctx.x_anchor - ctx.lambda * apply_adjoint(*ctx.op, y);
  return mask_from_z(ctx, z);
}

/// d -> (beta^{-1} + eps_reg) d + lambda A diag(mask) A^T d.
/// Two operator applications; SPD for eps_reg >= 0 since beta > 0.
template <typename Scalar>
DenseVector<Scalar> hessian_apply(const DualContext<Scalar>& ctx, const VectorArg<Scalar>& mask,
                                  Scalar eps_reg, const VectorArg<Scalar>& d) {
  detail::check_context(ctx);
  DenseVector<Scalar> inner = apply_adjoint(*ctx.op, d);
  inner.array() *= mask.array();
  return (Scalar(1) / ctx.beta + eps_reg) * d + ctx.lambda * apply(*ctx.op, inner);
}

}  // namespace epd
