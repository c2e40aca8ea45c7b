#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "epd/types.hpp"

namespace epd {

/// Explicit instance small enough for exhaustive search (n <= 14).
template <typename Scalar = double>
struct TinyInstance {
  DenseMatrix<Scalar> A;
  DenseVector<Scalar> b;
  Scalar delta = 0;
};

namespace detail {

constexpr double kRankTol = 1e-10;

// Visits every size-k index subset of {0..n-1} in lexicographic order.
inline void for_each_combination(Index n, Index k,
                                 const std::function<void(const std::vector<Index>&)>& visit) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (k > n) return;
  while (true) {
    visit(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Minimum-norm least-squares solution restricted to the given columns,
// embedded back into an n-vector. Returns the residual norm.
template <typename Scalar>
Scalar support_least_squares(const DenseMatrix<Scalar>& A, const DenseVector<Scalar>& b,
                             const std::vector<Index>& support, DenseVector<Scalar>& x_out) {
  x_out = DenseVector<Scalar>::Zero(A.cols());
  if (support.empty()) return b.norm();
  DenseMatrix<Scalar> sub(A.rows(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Index>(j)) = A.col(support[j]);
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(sub);
  cod.setThreshold(Scalar(kRankTol));
  const DenseVector<Scalar> coeff = cod.solve(b);
  for (std::size_t j = 0; j < support.size(); ++j) x_out[support[j]] = coeff[static_cast<Index>(j)];
  return (sub * coeff - b).norm();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exhaustive zero-norm minimum.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct L0Result {
  Index r = 0;                  // minimal support size meeting the residual bound
  DenseVector<Scalar> witness;  // a least-squares solution on a minimizing support
};

/// Enumerates supports by cardinality and returns the first one whose
/// least-squares residual is within delta + 1e-10.
template <typename Scalar>
L0Result<Scalar> brute_min_l0(const TinyInstance<Scalar>& tiny) {
  const Index n = tiny.A.cols();
  if (n > 14) throw std::invalid_argument("brute_min_l0: n must be <= 14");
  const Scalar bound = tiny.delta + Scalar(1e-10);
  L0Result<Scalar> result;
  for (Index card = 0; card <= n; ++card) {
    bool found = false;
    detail::for_each_combination(n, card, [&](const std::vector<Index>& support) {
      if (found) return;
      DenseVector<Scalar> x;
      if (detail::support_least_squares(tiny.A, tiny.b, support, x) <= bound) {
        found = true;
        result.r = card;
        result.witness = std::move(x);
      }
    });
    if (found) return result;
  }
  throw std::logic_error("brute_min_l0: unreachable (full support always feasible at delta >= 0)");
}

// ---------------------------------------------------------------------------
// Exhaustive penalty minimum.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PenaltyResult {
  Scalar value = 0;  // sum_i min(1, rho |x_i|) at the best feasible support
  DenseVector<Scalar> x;
  DenseVector<Scalar> v;  // v_i = 1 where rho |x_i| < 1, else 0
};

/// Penalty objective <e, e-v> + rho <v, |x|> minimized exactly over v in
/// [0,1]^n and over the least-squares candidates of every support. Requires
/// consistent data (delta = 0) and n <= 10.
template <typename Scalar>
PenaltyResult<Scalar> brute_penalty_min(const TinyInstance<Scalar>& tiny, Scalar rho) {
  const Index n = tiny.A.cols();
  if (n > 10) throw std::invalid_argument("brute_penalty_min: n must be <= 10");
  if (tiny.delta != Scalar(0)) throw std::invalid_argument("brute_penalty_min: delta must be 0");
  const Scalar feas = Scalar(1e-10);

  PenaltyResult<Scalar> best;
  best.value = std::numeric_limits<Scalar>::infinity();
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i)
      if (bits & (1u << i)) support.push_back(i);
    DenseVector<Scalar> x;
    if (detail::support_least_squares(tiny.A, tiny.b, support, x) > feas) continue;
    Scalar value = 0;
    for (Index i = 0; i < n; ++i) value += std::min(Scalar(1), rho * std::abs(x[i]));
    if (value < best.value) {
      best.value = value;
      best.x = std::move(x);
    }
  }
  if (!std::isfinite(best.value))
    throw std::invalid_argument("brute_penalty_min: instance is infeasible at delta = 0");
  best.v = DenseVector<Scalar>(n);
  for (Index i = 0; i < n; ++i)
    best.v[i] = rho * std::abs(best.x[i]) < Scalar(1) ? Scalar(1) : Scalar(0);
  return best;
}

// ---------------------------------------------------------------------------
// Null-space condition certification.
// ---------------------------------------------------------------------------

enum class NscVerdict { Certified, Violated, Inconclusive };

template <typename Scalar>
struct NscResult {
  NscVerdict verdict = NscVerdict::Inconclusive;
  Scalar margin = 0;     // min over the sphere grid of the weighted gap
  Scalar lipschitz = 0;  // certified Lipschitz constant of the gap on the sphere
  Index null_dim = 0;
};

/// Checks, over the unit sphere of a null-space basis (dimension at most 3),
/// that the weighted l1 mass of every null vector off the support strictly
/// exceeds the mass on the support:
///   sum_{i not in I} v_i |w_i| - sum_{i in I} v_i |w_i| > 0  for w = N c != 0.
/// A grid minimum above lipschitz * covering_radius certifies the condition;
/// any nonpositive grid value refutes it; otherwise the test is inconclusive.
template <typename Scalar>
NscResult<Scalar> check_nsc(const DenseMatrix<Scalar>& A, const VectorArg<Scalar>& v,
                            const std::vector<Index>& support) {
  const Index n = A.cols();
  NscResult<Scalar> out;

  Eigen::FullPivLU<DenseMatrix<Scalar>> lu(A);
  lu.setThreshold(Scalar(detail::kRankTol));
  DenseMatrix<Scalar> kernel = lu.kernel();
  // FullPivLU::kernel() returns one zero column for a trivial null space
  if (kernel.cols() == 1 && kernel.norm() == Scalar(0)) kernel.resize(n, 0);
  out.null_dim = kernel.cols();
  if (out.null_dim == 0) {
    out.verdict = NscVerdict::Certified;
    out.margin = std::numeric_limits<Scalar>::infinity();
    return out;
  }
  if (out.null_dim > 3)
    throw std::invalid_argument("check_nsc: null-space dimension must be <= 3");

  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(kernel);
  const DenseMatrix<Scalar> basis =
      qr.householderQ() * DenseMatrix<Scalar>::Identity(n, kernel.cols());

  std::vector<bool> on_support(static_cast<std::size_t>(n), false);
  for (Index i : support) {
    if (i < 0 || i >= n) throw std::invalid_argument("check_nsc: support index out of range");
    on_support[static_cast<std::size_t>(i)] = true;
  }

  const auto gap = [&](const DenseVector<Scalar>& c) {
    const DenseVector<Scalar> w = basis * c;
    Scalar g = 0;
    for (Index i = 0; i < n; ++i) {
      const Scalar t = v[i] * std::abs(w[i]);
      g += on_support[static_cast<std::size_t>(i)] ? -t : t;
    }
    return g;
  };

  Scalar lipschitz = 0;
  for (Index i = 0; i < n; ++i) lipschitz += v[i] * basis.row(i).norm();
  out.lipschitz = lipschitz;

  const Index d = out.null_dim;
  Scalar cover = 0;  // max distance from any sphere point to the grid
  Scalar margin = std::numeric_limits<Scalar>::infinity();
  if (d == 1) {
    DenseVector<Scalar> c(1);
    c[0] = Scalar(1);
    margin = gap(c);  // the gap is even in c, so one endpoint decides exactly
    cover = 0;
  } else if (d == 2) {
    const int steps = 4000;
    const Scalar dtheta = Scalar(2) * Scalar(EIGEN_PI) / Scalar(steps);
    DenseVector<Scalar> c(2);
    for (int i = 0; i < steps; ++i) {
      const Scalar theta = Scalar(i) * dtheta;
      c[0] = std::cos(theta);
      c[1] = std::sin(theta);
      margin = std::min(margin, gap(c));
    }
    cover = dtheta / Scalar(2);  // chord <= geodesic <= half step
  } else {
    const int n_theta = 400, n_phi = 800;
    const Scalar dtheta = Scalar(EIGEN_PI) / Scalar(n_theta);
    const Scalar dphi = Scalar(2) * Scalar(EIGEN_PI) / Scalar(n_phi);
    DenseVector<Scalar> c(3);
    for (int i = 0; i < n_theta; ++i) {
      const Scalar theta = (Scalar(i) + Scalar(0.5)) * dtheta;
      for (int j = 0; j < n_phi; ++j) {
        const Scalar phi_a = Scalar(j) * dphi;
        c[0] = std::sin(theta) * std::cos(phi_a);
        c[1] = std::sin(theta) * std::sin(phi_a);
        c[2] = std::cos(theta);
        margin = std::min(margin, gap(c));
      }
    }
    cover = std::sqrt(dtheta * dtheta + dphi * dphi) / Scalar(2);
  }

  out.margin = margin;
  if (margin <= Scalar(0))
    out.verdict = NscVerdict::Violated;
  else if (margin > lipschitz * cover)
    out.verdict = NscVerdict::Certified;
  else
    out.verdict = NscVerdict::Inconclusive;
  return out;
}

// ---------------------------------------------------------------------------
// Weighted basis-pursuit LP by vertex enumeration.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct LpResult {
  Scalar value = 0;
  DenseVector<Scalar> x;
  bool feasible = false;
};

/// min <v, |x|> s.t. A x = b, solved through the sign split
/// min v^T (p + q) s.t. [A, -A] [p; q] = b, p, q >= 0, by enumerating every
/// candidate vertex: column subsets of size <= m with independent columns.
template <typename Scalar>
LpResult<Scalar> bp_lp_oracle(const TinyInstance<Scalar>& tiny, const VectorArg<Scalar>& v) {
  const Index m = tiny.A.rows();
  const Index n = tiny.A.cols();
  if (n > 14) throw std::invalid_argument("bp_lp_oracle: n must be <= 14");
  if (tiny.delta != Scalar(0)) throw std::invalid_argument("bp_lp_oracle: delta must be 0");

  // combination-count guard so an oversized call fails fast instead of hanging
  double combos = 0, c = 1;
  for (Index s = 0; s <= m; ++s) {
    combos += c;
    c = c * static_cast<double>(2 * n - s) / static_cast<double>(s + 1);
  }
  if (combos > 5e6) throw std::invalid_argument("bp_lp_oracle: enumeration too large");

  DenseMatrix<Scalar> split(m, 2 * n);
  split.leftCols(n) = tiny.A;
  split.rightCols(n) = -tiny.A;

  const Scalar feas_tol = Scalar(1e-9) * (Scalar(1) + tiny.b.norm());
  LpResult<Scalar> best;
  best.value = std::numeric_limits<Scalar>::infinity();

  // the empty vertex is x = 0, feasible exactly when b = 0 (and then optimal,
  // since every weighted value is nonnegative); decompositions need columns
  if (tiny.b.norm() <= feas_tol) {
    best.value = 0;
    best.feasible = true;
    best.x = DenseVector<Scalar>::Zero(n);
  }

  for (Index size = 1; size <= m; ++size) {
    detail::for_each_combination(2 * n, size, [&](const std::vector<Index>& cols) {
      DenseMatrix<Scalar> sub(m, size);
      for (std::size_t j = 0; j < cols.size(); ++j)
        sub.col(static_cast<Index>(j)) = split.col(cols[j]);
      Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(sub);
      cod.setThreshold(Scalar(detail::kRankTol));
      if (cod.rank() < size) return;  // dependent columns cannot carry a vertex
      const DenseVector<Scalar> z = cod.solve(tiny.b);
      if ((sub * z - tiny.b).norm() > feas_tol) return;
      Scalar value = 0;
      bool nonneg = true;
      for (Index j = 0; j < size; ++j) {
        if (z[j] < -feas_tol) {
          nonneg = false;
          break;
        }
        value += v[cols[static_cast<std::size_t>(j)] % n] * std::max(z[j], Scalar(0));
      }
      if (!nonneg || value >= best.value) return;
      best.value = value;
      best.feasible = true;
      best.x = DenseVector<Scalar>::Zero(n);
      for (Index j = 0; j < size; ++j) {
        const Index col = cols[static_cast<std::size_t>(j)];
        const Scalar zj = std::max(z[j], Scalar(0));
        if (col < n)
          best.x[col] += zj;
        else
          best.x[col - n] -= zj;
      }
    });
  }
  if (!best.feasible) best.value = std::numeric_limits<Scalar>::quiet_NaN();
  return best;
}

}  // namespace epd
