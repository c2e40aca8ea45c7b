#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "epd/linop.hpp"
#include "oracles.hpp"

using epd::DenseMatrix;
using epd::DenseVector;
using epd::Index;
using epd::LinearOperator;
using epd::OperatorKind;

namespace {

DenseMatrix<double> dct_matrix(Index n) {
  DenseMatrix<double> c(n, n);
  const double pi = 3.14159265358979323846264338328;
  for (Index k = 0; k < n; ++k) {
    const double ak = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                             : std::sqrt(2.0 / static_cast<double>(n));
    for (Index j = 0; j < n; ++j)
      c(k, j) = ak * std::cos(pi * (static_cast<double>(j) + 0.5) * static_cast<double>(k) /
                              static_cast<double>(n));
  }
  return c;
}

}  // namespace

TEST_CASE("dense apply and adjoint match hand arithmetic") {
  DenseMatrix<double> a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  const auto op = LinearOperator<double>::FromDense(a);
  DenseVector<double> x(3);
  x << 1, 1, 1;
  const DenseVector<double> ax = epd::apply(op, x);
  CHECK(ax[0] == doctest::Approx(2).epsilon(1e-15));
  CHECK(ax[1] == doctest::Approx(2).epsilon(1e-15));

  DenseVector<double> y(2);
  y << 1, 1;
  const DenseVector<double> aty = epd::apply_adjoint(op, y);
  CHECK(aty[0] == doctest::Approx(1).epsilon(1e-15));
  CHECK(aty[1] == doctest::Approx(1).epsilon(1e-15));
  CHECK(aty[2] == doctest::Approx(2).epsilon(1e-15));
}

TEST_CASE("counter tallies forward and adjoint applications separately") {
  const auto op = testing_oracles::random_dense_op(3, 5, 11);
  const DenseVector<double> x = testing_oracles::random_vector(5, 12);
  const DenseVector<double> y = testing_oracles::random_vector(3, 13);

  CHECK(op.counter().nmat() == 0);
  (void)epd::apply(op, x);
  (void)epd::apply(op, x);
  (void)epd::apply_adjoint(op, y);
  CHECK(op.counter().n_forward() == 2);
  CHECK(op.counter().n_adjoint() == 1);
  CHECK(op.counter().nmat() == 3);

  (void)op.apply_impl(x);  // impl path is uncounted
  CHECK(op.counter().nmat() == 3);

  op.counter().reset();
  CHECK(op.counter().nmat() == 0);
}

TEST_CASE("scale multiplies both directions") {
  auto op = testing_oracles::random_dense_op(4, 6, 21);
  const DenseVector<double> x = testing_oracles::random_vector(6, 22);
  const DenseVector<double> y = testing_oracles::random_vector(4, 23);
  const DenseVector<double> ax = op.apply_impl(x);
  const DenseVector<double> aty = op.apply_adjoint_impl(y);
  op.set_scale(0.5);
  CHECK((op.apply_impl(x) - 0.5 * ax).norm() == doctest::Approx(0).epsilon(1e-14));
  CHECK((op.apply_adjoint_impl(y) - 0.5 * aty).norm() == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("adjoint is consistent with the forward map for every kind") {
  std::vector<LinearOperator<double>> ops;
  ops.push_back(testing_oracles::random_dense_op(5, 9, 31));
  ops.push_back(LinearOperator<double>::PartialDct(16, {0, 3, 4, 9, 15}));
  ops.push_back(LinearOperator<double>::PartialHadamard(16, {1, 2, 7, 8}));
  for (const auto& op : ops) {
    const DenseVector<double> x = testing_oracles::random_vector(op.cols(), 32);
    const DenseVector<double> y = testing_oracles::random_vector(op.rows(), 33);
    const double lhs = epd::apply(op, x).dot(y);
    const double rhs = x.dot(epd::apply_adjoint(op, y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("partial DCT equals the explicit transform matrix") {
  const Index n = 16;
  std::vector<Index> all_rows(n);
  for (Index i = 0; i < n; ++i) all_rows[static_cast<std::size_t>(i)] = i;
  const auto op = LinearOperator<double>::PartialDct(n, all_rows);
  const DenseMatrix<double> c = dct_matrix(n);
  CHECK((op.to_dense() - c).cwiseAbs().maxCoeff() < 1e-12);

  // orthonormal rows: C C^T = I
  CHECK(((c * c.transpose()) - DenseMatrix<double>::Identity(n, n)).cwiseAbs().maxCoeff() <
        1e-10);

  const auto partial = LinearOperator<double>::PartialDct(n, {2, 5, 11});
  const DenseMatrix<double> d = partial.to_dense();
  CHECK((d.row(0) - c.row(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d.row(1) - c.row(5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d.row(2) - c.row(11)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial Hadamard matches the popcount entry formula") {
  const Index n = 8;
  const std::vector<Index> rows = {0, 3, 6};
  const auto op = LinearOperator<double>::PartialHadamard(n, rows);
  const DenseMatrix<double> d = op.to_dense();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < n; ++j) {
      const int bits = __builtin_popcountll(
          static_cast<unsigned long long>(rows[i] & j));
      const double expected = (bits & 1) ? -1.0 : 1.0;
      CHECK(d(static_cast<Index>(i), j) == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("full Hadamard satisfies H H^T = n I") {
  const Index n = 16;
  std::vector<Index> all_rows(n);
  for (Index i = 0; i < n; ++i) all_rows[static_cast<std::size_t>(i)] = i;
  const auto op = LinearOperator<double>::PartialHadamard(n, all_rows);
  const DenseMatrix<double> h = op.to_dense();
  CHECK(((h * h.transpose()) - static_cast<double>(n) * DenseMatrix<double>::Identity(n, n))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("Hadamard rejects non-power-of-two dimensions") {
  CHECK_THROWS_AS(LinearOperator<double>::PartialHadamard(12, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(LinearOperator<double>::PartialHadamard(0, {}), std::invalid_argument);
}

TEST_CASE("row selection out of range is rejected") {
  CHECK_THROWS_AS(LinearOperator<double>::PartialDct(8, {0, 8}), std::invalid_argument);
  CHECK_THROWS_AS(LinearOperator<double>::PartialDct(8, {-1}), std::invalid_argument);
}

TEST_CASE("size mismatches throw") {
  const auto op = testing_oracles::random_dense_op(3, 5, 41);
  const DenseVector<double> wrong = testing_oracles::random_vector(4, 42);
  CHECK_THROWS_AS((void)epd::apply(op, wrong), std::invalid_argument);
  CHECK_THROWS_AS((void)epd::apply_adjoint(op, wrong), std::invalid_argument);
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
  for (std::uint64_t seed : {51ull, 52ull, 53ull}) {
    const auto op = testing_oracles::random_dense_op(6, 14, seed);
    const double reference = testing_oracles::lambda_max_aat(op.dense_values());
    const auto est = epd::largest_eigenvalue_aat(op);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(reference).epsilon(1e-6));
  }
}

TEST_CASE("power iteration sees the scale factor") {
  auto op = testing_oracles::random_dense_op(5, 10, 61);
  const double base = epd::largest_eigenvalue_aat(op).value;
  op.set_scale(0.5);
  CHECK(epd::largest_eigenvalue_aat(op).value == doctest::Approx(0.25 * base).epsilon(1e-8));
}

TEST_CASE("orthonormal-row operators have unit spectral norm") {
  const auto op = LinearOperator<double>::PartialDct(32, {1, 4, 9, 16, 25});
  CHECK(epd::largest_eigenvalue_aat(op).value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("to_dense matches counted applications column by column") {
  const auto op = LinearOperator<double>::PartialHadamard(8, {0, 5});
  const DenseMatrix<double> d = op.to_dense();
  for (Index j = 0; j < op.cols(); ++j) {
    DenseVector<double> unit = DenseVector<double>::Zero(op.cols());
    unit[j] = 1.0;
    CHECK((epd::apply(op, unit) - d.col(j)).cwiseAbs().maxCoeff() < 1e-14);
  }
}
