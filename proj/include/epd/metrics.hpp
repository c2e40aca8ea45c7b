#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "epd/linop.hpp"
#include "epd/types.hpp"

namespace epd {

/// Effective sparsity: the smallest head count of the magnitude-sorted entries
/// holding at least 99.9% of the l1 mass. Zero vectors report 0.
template <typename Derived>
Index nnzx(const Eigen::MatrixBase<Derived>& x_expr) {
  using Scalar = typename Derived::Scalar;
  const VectorRef<Scalar> x(x_expr.derived());
  const Scalar total = x.template lpNorm<1>();
  if (total == Scalar(0)) return 0;
  std::vector<Scalar> mags(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<Scalar>());
  const Scalar target = Scalar(0.999) * total;
  Scalar acc = 0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    acc += mags[i];
    if (acc >= target) return static_cast<Index>(i + 1);
  }
  return x.size();
}

struct SupportDiagnostics {
  Index sgn = 0;   // strict sign flips among entries nonzero on both sides
  Index miss = 0;  // true-support entries zeroed out
  Index over = 0;  // off-support entries left nonzero
};

/// Entries of x_f with magnitude strictly below 10% of the smallest nonzero
/// magnitude of x_star are treated as zero, then the three counts compare
/// supports and signs. x_star must be nonzero.
template <typename DerivedF, typename DerivedS>
SupportDiagnostics support_diagnostics(const Eigen::MatrixBase<DerivedF>& x_f_expr,
                                       const Eigen::MatrixBase<DerivedS>& x_star_expr) {
  using Scalar = typename DerivedF::Scalar;
  const VectorRef<Scalar> x_f(x_f_expr.derived());
  const VectorRef<Scalar> x_star(x_star_expr.derived());
  if (x_f.size() != x_star.size())
    throw std::invalid_argument("support_diagnostics: size mismatch");
  Scalar smallest = 0;
  bool any = false;
  for (Index i = 0; i < x_star.size(); ++i) {
    if (x_star[i] != Scalar(0)) {
      const Scalar a = std::abs(x_star[i]);
      smallest = any ? std::min(smallest, a) : a;
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("support_diagnostics: x_star is identically zero");
  const Scalar threshold = Scalar(0.1) * smallest;

  SupportDiagnostics out;
  for (Index i = 0; i < x_f.size(); ++i) {
    const Scalar cleaned = std::abs(x_f[i]) < threshold ? Scalar(0) : x_f[i];
    const bool f_nz = cleaned != Scalar(0);
    const bool s_nz = x_star[i] != Scalar(0);
    if (!f_nz && s_nz) ++out.miss;
    if (f_nz && !s_nz) ++out.over;
    if (f_nz && s_nz && cleaned * x_star[i] < Scalar(0)) ++out.sgn;
  }
  return out;
}

/// One benchmark-table row worth of quality measures for a solve.
template <typename Scalar>
struct RecoveryRecord {
  std::optional<Scalar> relerr;  // ||x_f - x*|| / ||x*||, absent without ground truth
  Scalar res = 0;                // ||A x_f - b||
  Index nnzx = 0;
  SupportDiagnostics support;
  bool success = false;  // relerr < 5e-7, strict; false without ground truth
  double time_s = 0;
  std::uint64_t nmat = 0;
  int outer_iterations = 0;
  int exit_stage = 0;
};

template <typename Scalar>
constexpr Scalar success_relerr_threshold() {
  return Scalar(5e-7);
}

template <typename Scalar>
RecoveryRecord<Scalar> assess_recovery(const VectorArg<Scalar>& x_f,
                                       const LinearOperator<Scalar>& op,
                                       const VectorArg<Scalar>& b,
                                       const std::optional<DenseVector<Scalar>>& x_star) {
  RecoveryRecord<Scalar> rec;
  rec.res = (op.apply_impl(x_f) - b).norm();  // assessment does not disturb nmat
  rec.nnzx = nnzx(x_f);
  if (x_star.has_value() && x_star->size() == x_f.size()) {
    const Scalar denom = x_star->norm();
    if (denom > Scalar(0)) {
      rec.relerr = (x_f - *x_star).norm() / denom;
      rec.success = *rec.relerr < success_relerr_threshold<Scalar>();
      rec.support = support_diagnostics(x_f, *x_star);
    }
  }
  return rec;
}

}  // namespace epd
