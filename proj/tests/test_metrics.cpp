#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "epd/generate.hpp"
#include "epd/metrics.hpp"
#include "oracles.hpp"

using epd::DenseVector;
using epd::Index;

TEST_CASE("nnzx counts the shortest head holding 99.9% of the l1 mass") {
  DenseVector<double> x(3);
  x << 10.0, 1.0, 0.001;
  CHECK(epd::nnzx(x) == 2);

  DenseVector<double> single(4);
  single << 0.0, -7.0, 0.0, 0.0;
  CHECK(epd::nnzx(single) == 1);

  CHECK(epd::nnzx(DenseVector<double>::Zero(6)) == 0);

  DenseVector<double> flat = DenseVector<double>::Ones(5);
  CHECK(epd::nnzx(flat) == 5);  // any 4 entries hold only 80% < 99.9%
}

TEST_CASE("nnzx matches the linear-scan reference on random data") {
  for (int trial = 0; trial < 1000; ++trial) {
    epd::Rng rng(10000 + static_cast<std::uint64_t>(trial));
    const Index n = 1 + static_cast<Index>(rng.below(30));
    DenseVector<double> x(n);
    for (Index i = 0; i < n; ++i) {
      // mix of large, small, and exact-zero entries
      const double u = rng.uniform01();
      if (u < 0.3)
        x[i] = 0.0;
      else if (u < 0.6)
        x[i] = rng.normal() * 1e-4;
      else
        x[i] = rng.normal() * 10.0;
    }
    CHECK(epd::nnzx(x) == testing_oracles::nnzx_scan_oracle(x));
  }
}

TEST_CASE("support diagnostics on the worked example") {
  DenseVector<double> x_star(4);
  x_star << 1.0, 0.0, -2.0, 0.0;
  DenseVector<double> x_f(4);
  x_f << 0.9, 0.0, 2.0, 0.15;
  const auto d = epd::support_diagnostics(x_f, x_star);
  CHECK(d.sgn == 1);   // entry 2 flips sign
  CHECK(d.miss == 0);  // both true-support entries survive the 0.1 threshold
  CHECK(d.over == 1);  // entry 3 (0.15) stays above threshold off-support
}

TEST_CASE("support diagnostics edge cases") {
  DenseVector<double> x_star(4);
  x_star << 1.0, 0.0, -2.0, 0.0;

  const auto exact = epd::support_diagnostics(x_star, x_star);
  CHECK(exact.sgn == 0);
  CHECK(exact.miss == 0);
  CHECK(exact.over == 0);

  const DenseVector<double> zero = DenseVector<double>::Zero(4);
  const auto missed = epd::support_diagnostics(zero, x_star);
  CHECK(missed.sgn == 0);
  CHECK(missed.miss == 2);
  CHECK(missed.over == 0);

  // magnitudes exactly at the threshold count as nonzero (cut is strict below)
  DenseVector<double> boundary(4);
  boundary << 0.1, 0.0, -0.1, 0.1;
  const auto at = epd::support_diagnostics(boundary, x_star);
  CHECK(at.miss == 0);
  CHECK(at.over == 1);
  CHECK(at.sgn == 0);

  // just below the threshold flips to zero
  DenseVector<double> below(4);
  below << 0.099, 0.0, -0.099, 0.099;
  const auto under = epd::support_diagnostics(below, x_star);
  CHECK(under.miss == 2);
  CHECK(under.over == 0);

  CHECK_THROWS_AS(epd::support_diagnostics(zero, zero), std::invalid_argument);
  DenseVector<double> shorter(3);
  shorter.setZero();
  CHECK_THROWS_AS(epd::support_diagnostics(shorter, x_star), std::invalid_argument);
}

TEST_CASE("assess_recovery fills every field and leaves the counter alone") {
  const auto instance = epd::gen_instance<double>(1, 1, 30, 12, 3, 777);
  const DenseVector<double>& x_star = *instance.x_true;

  const auto exact = epd::assess_recovery<double>(x_star, instance.op, instance.b, instance.x_true);
  REQUIRE(exact.relerr.has_value());
  CHECK(*exact.relerr == 0.0);
  CHECK(exact.success);
  CHECK(exact.res < 1e-12);
  CHECK(exact.nnzx == testing_oracles::nnzx_scan_oracle(x_star));
  CHECK(exact.support.miss == 0);
  CHECK(exact.support.over == 0);
  CHECK(exact.support.sgn == 0);
  CHECK(instance.op.counter().nmat() == 0);

  const auto blind =
      epd::assess_recovery<double>(x_star, instance.op, instance.b, std::nullopt);
  CHECK_FALSE(blind.relerr.has_value());
  CHECK_FALSE(blind.success);
}

TEST_CASE("success demands a relative error strictly below 5e-7") {
  CHECK(epd::success_relerr_threshold<double>() == 5e-7);

  DenseVector<double> x_star(2);
  x_star << 1.0, 0.0;
  const auto op = epd::LinearOperator<double>::FromDense(
      epd::DenseMatrix<double>::Identity(2, 2));
  const DenseVector<double> b = x_star;

  const auto run = [&](double err) {
    DenseVector<double> x_f = x_star;
    x_f[1] += err;  // perturb the zero coordinate: the difference is exactly err
    return epd::assess_recovery<double>(x_f, op, b,
                                        std::optional<DenseVector<double>>(x_star));
  };

  CHECK(run(4.9e-7).success);
  CHECK_FALSE(run(5.1e-7).success);

  // a relative error landing exactly on the threshold fails (strict inequality);
  // only checkable when the norm round-trips exactly through sqrt
  const double c = 5e-7;
  if (std::sqrt(c * c) == c) {
    const auto at = run(c);
    REQUIRE(at.relerr.has_value());
    CHECK(*at.relerr == c);
    CHECK_FALSE(at.success);
  }
}
