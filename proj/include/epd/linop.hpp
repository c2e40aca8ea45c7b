#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epd/types.hpp"

namespace epd {

/// Thread-safe forward/adjoint application counter. Concurrent applies from a
/// worker pool must not lose counts, so both tallies are atomics.
class MatvecCounter {
 public:
  MatvecCounter() = default;
  MatvecCounter(const MatvecCounter& other)
      : forward_(other.forward_.load()), adjoint_(other.adjoint_.load()) {}
  MatvecCounter& operator=(const MatvecCounter& other) {
    forward_.store(other.forward_.load());
    adjoint_.store(other.adjoint_.load());
    return *this;
  }

  void count_forward() { forward_.fetch_add(1, std::memory_order_relaxed); }
  void count_adjoint() { adjoint_.fetch_add(1, std::memory_order_relaxed); }

  std::uint64_t n_forward() const { return forward_.load(); }
  std::uint64_t n_adjoint() const { return adjoint_.load(); }
  std::uint64_t nmat() const { return n_forward() + n_adjoint(); }

  void reset() {
    forward_.store(0);
    adjoint_.store(0);
  }

 private:
  std::atomic<std::uint64_t> forward_{0};
  std::atomic<std::uint64_t> adjoint_{0};
};

enum class OperatorKind { Dense, PartialDct, PartialHadamard };

/// Sensing operator: either an explicit dense matrix or an implicit row
/// selection of an orthogonal n-by-n transform (type-II DCT with orthonormal
/// rows, or a Sylvester Hadamard matrix). Implicit kinds store O(m + n) data
/// and never materialize an m-by-n array. All applications go through the
/// free functions apply / apply_adjoint below, which bump the counter.
///
/// `scale` multiplies the operator's action and is recorded separately from
/// the stored values so normalization stays auditable.
template <typename Scalar = double>
class LinearOperator {
 public:
  using Vector = DenseVector<Scalar>;
  using Matrix = DenseMatrix<Scalar>;

  static LinearOperator FromDense(Matrix values) {
    LinearOperator op;
    op.kind_ = OperatorKind::Dense;
    op.rows_ = values.rows();
    op.cols_ = values.cols();
    op.dense_ = std::move(values);
    return op;
  }

  static LinearOperator PartialDct(Index n, std::vector<Index> selected_rows) {
    LinearOperator op;
    op.kind_ = OperatorKind::PartialDct;
    op.init_implicit(n, std::move(selected_rows));
    // cos(pi * t / (2n)) for t in [0, 4n): the full period of every row angle
    op.cos_table_.resize(static_cast<std::size_t>(4 * n));
    const double step = 3.14159265358979323846264338328 / (2.0 * static_cast<double>(n));
    for (Index t = 0; t < 4 * n; ++t)
      op.cos_table_[static_cast<std::size_t>(t)] =
          static_cast<Scalar>(std::cos(step * static_cast<double>(t)));
    return op;
  }

  static LinearOperator PartialHadamard(Index n, std::vector<Index> selected_rows) {
    if (n <= 0 || (n & (n - 1)) != 0)
      throw std::invalid_argument("PartialHadamard: dimension must be a power of two");
    LinearOperator op;
    op.kind_ = OperatorKind::PartialHadamard;
    op.init_implicit(n, std::move(selected_rows));
    return op;
  }

  OperatorKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  Scalar scale() const { return scale_; }
  void set_scale(Scalar s) { scale_ = s; }

  const Matrix& dense_values() const { return dense_; }
  const std::vector<Index>& row_selection() const { return selection_; }

  MatvecCounter& counter() const { return counter_; }

  /// Effective matrix (scale folded in); materializes implicit kinds, so it is
  /// meant for export and small-scale checks, not the solve path.
  Matrix to_dense() const {
    Matrix out(rows_, cols_);
    Vector unit = Vector::Zero(cols_);
    for (Index j = 0; j < cols_; ++j) {
      unit[j] = Scalar(1);
      out.col(j) = apply_impl(unit);
      unit[j] = Scalar(0);
    }
    return out;
  }

  // internal: unscaled-by-counter application paths shared by apply()/apply_adjoint()
  Vector apply_impl(const VectorRef<Scalar>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("apply: size mismatch");
    switch (kind_) {
      case OperatorKind::Dense:
        return scale_ * (dense_ * x).eval();
      case OperatorKind::PartialDct: {
        Vector y(rows_);
        const Index n = cols_;
        const Scalar a0 = Scalar(std::sqrt(1.0 / static_cast<double>(n)));
        const Scalar ak = Scalar(std::sqrt(2.0 / static_cast<double>(n)));
        for (Index i = 0; i < rows_; ++i) {
          const Index k = selection_[static_cast<std::size_t>(i)];
          Scalar acc = 0;
          for (Index j = 0; j < n; ++j)
            acc += x[j] * cos_table_[static_cast<std::size_t>(((2 * j + 1) * k) % (4 * n))];
          y[i] = (k == 0 ? a0 : ak) * acc;
        }
        return (scale_ * y).eval();
      }
      case OperatorKind::PartialHadamard: {
        Vector full = x;
        fwht(full);
        Vector y(rows_);
        for (Index i = 0; i < rows_; ++i) y[i] = full[selection_[static_cast<std::size_t>(i)]];
        return (scale_ * y).eval();
      }
    }
    throw std::logic_error("apply: unknown kind");
  }

  Vector apply_adjoint_impl(const VectorRef<Scalar>& y) const {
    if (y.size() != rows_) throw std::invalid_argument("apply_adjoint: size mismatch");
    switch (kind_) {
      case OperatorKind::Dense:
        return scale_ * (dense_.transpose() * y).eval();
      case OperatorKind::PartialDct: {
        const Index n = cols_;
        Vector x = Vector::Zero(n);
        const Scalar a0 = Scalar(std::sqrt(1.0 / static_cast<double>(n)));
        const Scalar ak = Scalar(std::sqrt(2.0 / static_cast<double>(n)));
        for (Index i = 0; i < rows_; ++i) {
          const Index k = selection_[static_cast<std::size_t>(i)];
          const Scalar w = (k == 0 ? a0 : ak) * y[i];
          for (Index j = 0; j < n; ++j)
            x[j] += w * cos_table_[static_cast<std::size_t>(((2 * j + 1) * k) % (4 * n))];
        }
        return (scale_ * x).eval();
      }
      case OperatorKind::PartialHadamard: {
        // Sylvester H is symmetric, so A^T y = H (expand y onto selected rows).
        Vector full = Vector::Zero(cols_);
        for (Index i = 0; i < rows_; ++i) full[selection_[static_cast<std::size_t>(i)]] = y[i];
        fwht(full);
        return (scale_ * full).eval();
      }
    }
    throw std::logic_error("apply_adjoint: unknown kind");
  }

 private:
  void init_implicit(Index n, std::vector<Index> selected_rows) {
    for (Index k : selected_rows)
      if (k < 0 || k >= n) throw std::invalid_argument("row selection out of range");
    rows_ = static_cast<Index>(selected_rows.size());
    cols_ = n;
    selection_ = std::move(selected_rows);
  }

  static void fwht(Vector& v) {
    const Index n = v.size();
    for (Index len = 1; len < n; len <<= 1)
      for (Index i = 0; i < n; i += len << 1)
        for (Index j = i; j < i + len; ++j) {
          const Scalar a = v[j];
          const Scalar b = v[j + len];
          v[j] = a + b;
          v[j + len] = a - b;
        }
  }

  OperatorKind kind_ = OperatorKind::Dense;
  Index rows_ = 0, cols_ = 0;
  Matrix dense_;
  std::vector<Index> selection_;
  std::vector<Scalar> cos_table_;
  Scalar scale_ = Scalar(1);
  mutable MatvecCounter counter_;
};

template <typename Scalar>
DenseVector<Scalar> apply(const LinearOperator<Scalar>& op, const VectorArg<Scalar>& x) {
  op.counter().count_forward();
  return op.apply_impl(x);
}

template <typename Scalar>
DenseVector<Scalar> apply_adjoint(const LinearOperator<Scalar>& op, const VectorArg<Scalar>& y) {
  op.counter().count_adjoint();
  return op.apply_adjoint_impl(y);
}

template <typename Scalar>
struct SpectralEstimate {
  Scalar value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration for lambda_max(A A^T). Deterministic start vector, relative
/// tolerance on the Rayleigh quotient, iteration cap 10*m with a warning flag
/// on non-convergence (best estimate still returned).
template <typename Scalar>
SpectralEstimate<Scalar> largest_eigenvalue_aat(const LinearOperator<Scalar>& op,
                                                Scalar rel_tol = Scalar(1e-8)) {
  using Vector = DenseVector<Scalar>;
  const Index m = op.rows();
  SpectralEstimate<Scalar> est;
  if (m == 0) {
    est.converged = true;
    return est;
  }
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  Vector v(m);
  for (Index i = 0; i < m; ++i)
    v[i] = Scalar(static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5);
  Scalar nv = v.norm();
  if (nv == Scalar(0)) v.setOnes(), nv = v.norm();
  v /= nv;

  Scalar prev = 0;
  const int cap = static_cast<int>(10 * m);
  for (int it = 1; it <= cap; ++it) {
    Vector w = apply(op, apply_adjoint(op, v));
    const Scalar rayleigh = v.dot(w);
    const Scalar nw = w.norm();
    est.value = rayleigh;
    est.iterations = it;
    if (nw == Scalar(0)) {  // A is zero
      est.value = 0;
      est.converged = true;
      return est;
    }
    v = w / nw;
    if (it > 1 && std::abs(rayleigh - prev) <= rel_tol * std::max(std::abs(rayleigh), Scalar(1e-30))) {
      est.converged = true;
      return est;
    }
    prev = rayleigh;
  }
  return est;  // converged stays false: estimate usable but flagged
}

}  // namespace epd
