#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "epd/oracle.hpp"
#include "epd/rng.hpp"
#include "oracles.hpp"

using epd::DenseMatrix;
using epd::DenseVector;
using epd::Index;
using epd::TinyInstance;

namespace {

// Planted consistent instance: K spike entries with magnitudes in [0.5, 1.5].
TinyInstance<double> planted_tiny(Index m, Index n, Index k, std::uint64_t seed,
                                  std::vector<Index>* support_out = nullptr,
                                  DenseVector<double>* x_out = nullptr) {
  epd::Rng rng(seed);
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) tiny.A(i, j) = rng.normal();
  auto support = rng.sample_indices(n, k);
  DenseVector<double> x = DenseVector<double>::Zero(n);
  for (Index idx : support) x[idx] = rng.sign() * rng.uniform(0.5, 1.5);
  tiny.b = tiny.A * x;
  tiny.delta = 0.0;
  if (support_out) *support_out = std::move(support);
  if (x_out) *x_out = std::move(x);
  return tiny;
}

}  // namespace

TEST_CASE("brute_min_l0 on hand examples") {
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>(2, 3);
  tiny.A << 1, 0, 1, 0, 1, 1;
  tiny.b = DenseVector<double>(2);
  tiny.b << 1, 1;
  const auto res = epd::brute_min_l0(tiny);
  CHECK(res.r == 1);
  REQUIRE(res.witness.size() == 3);
  CHECK(res.witness[0] == 0.0);  // off-support entries are exactly zero
  CHECK(res.witness[1] == 0.0);
  CHECK(res.witness[2] == doctest::Approx(1.0));

  tiny.b.setZero();
  CHECK(epd::brute_min_l0(tiny).r == 0);
}

TEST_CASE("brute_min_l0 recovers a planted support") {
  for (std::uint64_t seed : {101, 102, 103}) {
    std::vector<Index> support;
    DenseVector<double> x;
    const auto tiny = planted_tiny(4, 10, 2, seed, &support, &x);
    const auto res = epd::brute_min_l0(tiny);
    CHECK(res.r == 2);
    CHECK((res.witness - x).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("brute_min_l0 honors a positive residual allowance") {
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>::Identity(2, 2);
  tiny.b = DenseVector<double>(2);
  tiny.b << 1.0, 0.05;
  tiny.delta = 0.2;
  CHECK(epd::brute_min_l0(tiny).r == 1);  // dropping the 0.05 entry stays within 0.2
  tiny.delta = 0.0;
  CHECK(epd::brute_min_l0(tiny).r == 2);
}

TEST_CASE("brute_min_l0 rejects oversized problems") {
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>::Zero(2, 15);
  tiny.b = DenseVector<double>::Zero(2);
  CHECK_THROWS_AS(epd::brute_min_l0(tiny), std::invalid_argument);
}

TEST_CASE("brute_penalty_min limits and preconditions") {
  std::vector<Index> support;
  DenseVector<double> x;
  const auto tiny = planted_tiny(3, 6, 2, 111, &support, &x);

  // rho = 0 zeroes every term
  const auto at_zero = epd::brute_penalty_min(tiny, 0.0);
  CHECK(at_zero.value == 0.0);
  CHECK((at_zero.v.array() == 1.0).all());

  // the optimal value is nondecreasing in rho and reaches the zero-norm minimum
  const auto l0 = epd::brute_min_l0(tiny);
  double prev = -1.0;
  for (int j = 0; j <= 16; ++j) {
    const double rho = std::ldexp(1.0, j);
    const auto res = epd::brute_penalty_min(tiny, rho);
    CHECK(res.value >= prev - 1e-12);
    prev = res.value;
    CHECK(res.value <= static_cast<double>(l0.r) + 1e-12);
  }
  const auto large = epd::brute_penalty_min(tiny, std::ldexp(1.0, 16));
  CHECK(large.value == doctest::Approx(static_cast<double>(l0.r)).epsilon(1e-10));
  // at the planted solution the weights mark exactly the off-support entries
  for (Index i = 0; i < 6; ++i) CHECK(large.v[i] == (x[i] == 0.0 ? 1.0 : 0.0));

  TinyInstance<double> noisy = tiny;
  noisy.delta = 0.1;
  CHECK_THROWS_AS(epd::brute_penalty_min(noisy, 1.0), std::invalid_argument);

  TinyInstance<double> wide;
  wide.A = DenseMatrix<double>::Zero(2, 11);
  wide.b = DenseVector<double>::Zero(2);
  CHECK_THROWS_AS(epd::brute_penalty_min(wide, 1.0), std::invalid_argument);
}

TEST_CASE("brute_penalty_min on a square invertible system") {
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>(2, 2);
  tiny.A << 2, 1, 1, 3;
  DenseVector<double> xbar(2);
  xbar << 0.4, -1.7;
  tiny.b = tiny.A * xbar;
  const double rho = 3.0;
  const auto res = epd::brute_penalty_min(tiny, rho);
  double expect = 0.0;
  for (Index i = 0; i < 2; ++i) expect += std::min(1.0, rho * std::abs(xbar[i]));
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-12));
  CHECK((res.x - xbar).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("check_nsc certifies and refutes one-dimensional null spaces") {
  DenseMatrix<double> a(1, 2);
  a << 1, 1;
  const DenseVector<double> ones = DenseVector<double>::Ones(2);

  // null vector has equal magnitudes; weighting decides the verdict cleanly
  DenseVector<double> w_light(2), w_heavy(2);
  w_heavy << 2, 1;  // support entry weighted heavier -> gap negative
  w_light << 1, 2;  // off-support weighted heavier -> gap positive
  const auto bad = epd::check_nsc<double>(a, w_heavy, {0});
  CHECK(bad.verdict == epd::NscVerdict::Violated);
  CHECK(bad.null_dim == 1);
  CHECK(bad.margin == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const auto good = epd::check_nsc<double>(a, w_light, {0});
  CHECK(good.verdict == epd::NscVerdict::Certified);
  CHECK(good.margin == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  DenseMatrix<double> tilted(1, 2);
  tilted << 2, 1;  // kernel (1,-2)/sqrt(5)
  const auto cert = epd::check_nsc<double>(tilted, ones, {0});
  CHECK(cert.verdict == epd::NscVerdict::Certified);
  CHECK(cert.margin == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));

  DenseMatrix<double> reversed(1, 2);
  reversed << 1, 2;  // kernel (2,-1)/sqrt(5): support carries the large entry
  const auto viol = epd::check_nsc<double>(reversed, ones, {0});
  CHECK(viol.verdict == epd::NscVerdict::Violated);
  CHECK(viol.margin == doctest::Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("check_nsc trivial, planar, and oversized null spaces") {
  // square invertible: trivial null space certifies with infinite margin
  DenseMatrix<double> sq(2, 2);
  sq << 3, 1, 1, 2;
  const auto triv = epd::check_nsc<double>(sq, DenseVector<double>::Ones(2), {0});
  CHECK(triv.verdict == epd::NscVerdict::Certified);
  CHECK(triv.null_dim == 0);
  CHECK(std::isinf(triv.margin));

  // d = 2 plane where the gap touches zero along a direction: never certified
  DenseMatrix<double> flat(1, 3);
  flat << 1, 1, 1;
  const auto touch = epd::check_nsc<double>(flat, DenseVector<double>::Ones(3), {0});
  CHECK(touch.null_dim == 2);
  CHECK(touch.verdict != epd::NscVerdict::Certified);
  CHECK(touch.margin <= 1e-3);

  // d = 2 with empty support: the gap is the full weighted mass, safely positive
  const auto tiny = planted_tiny(2, 4, 1, 121);
  const auto empty = epd::check_nsc<double>(tiny.A, DenseVector<double>::Ones(4), {});
  CHECK(empty.null_dim == 2);
  CHECK(empty.verdict == epd::NscVerdict::Certified);
  CHECK(empty.margin >= 0.9);

  DenseMatrix<double> wide(1, 5);
  wide << 1, 1, 1, 1, 1;
  CHECK_THROWS_AS(epd::check_nsc<double>(wide, DenseVector<double>::Ones(5), {0}),
                  std::invalid_argument);
  DenseMatrix<double> two(1, 2);
  two << 1, 1;
  CHECK_THROWS_AS(epd::check_nsc<double>(two, DenseVector<double>::Ones(2), {5}),
                  std::invalid_argument);
}

TEST_CASE("bp_lp_oracle on hand examples") {
  TinyInstance<double> tiny;
  tiny.A = DenseMatrix<double>(1, 2);
  tiny.A << 1, 1;
  tiny.b = DenseVector<double>(1);
  tiny.b << 2;

  const auto lp = epd::bp_lp_oracle<double>(tiny, DenseVector<double>::Ones(2));
  CHECK(lp.feasible);
  CHECK(lp.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((tiny.A * lp.x - tiny.b).norm() < 1e-9);

  const auto free = epd::bp_lp_oracle<double>(tiny, DenseVector<double>::Zero(2));
  CHECK(free.feasible);
  CHECK(free.value == 0.0);  // zero weights make every feasible vertex cost 0 exactly

  TinyInstance<double> infeasible;
  infeasible.A = DenseMatrix<double>(2, 1);
  infeasible.A << 1, 1;
  infeasible.b = DenseVector<double>(2);
  infeasible.b << 1, 2;
  const auto none = epd::bp_lp_oracle<double>(infeasible, DenseVector<double>::Ones(1));
  CHECK_FALSE(none.feasible);
  CHECK(std::isnan(none.value));
}

TEST_CASE("bp_lp_oracle guards oversized enumerations") {
  TinyInstance<double> big;
  big.A = DenseMatrix<double>::Zero(14, 14);
  big.b = DenseVector<double>::Zero(14);
  CHECK_THROWS_AS(epd::bp_lp_oracle<double>(big, DenseVector<double>::Ones(14)),
                  std::invalid_argument);
  TinyInstance<double> wide;
  wide.A = DenseMatrix<double>::Zero(2, 15);
  wide.b = DenseVector<double>::Zero(2);
  CHECK_THROWS_AS(epd::bp_lp_oracle<double>(wide, DenseVector<double>::Ones(15)),
                  std::invalid_argument);
}

TEST_CASE("a certified null-space condition implies weighted-l1 recovery") {
  int certified = 0;
  for (std::uint64_t seed = 131; seed < 151 && certified < 3; ++seed) {
    std::vector<Index> support;
    DenseVector<double> x;
    const auto tiny = planted_tiny(5, 8, 2, seed, &support, &x);
    const DenseVector<double> ones = DenseVector<double>::Ones(8);
    const auto nsc = epd::check_nsc<double>(tiny.A, ones, support);
    if (nsc.verdict != epd::NscVerdict::Certified) continue;
    ++certified;
    const auto lp = epd::bp_lp_oracle<double>(tiny, ones);
    REQUIRE(lp.feasible);
    CHECK(lp.value == doctest::Approx(x.cwiseAbs().sum()).epsilon(1e-9));
    CHECK((lp.x - x).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK(certified >= 1);
}
