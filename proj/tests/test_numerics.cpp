#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "mlckpt/errors.hpp"
#include "mlckpt/model.hpp"
#include "mlckpt/numerics.hpp"
#include "mlckpt/philox.hpp"

using namespace mlckpt;

namespace {

// test-side oracle: solve w e^w = z by bisection (monotone for w >= -1)
double lambert_by_bisection(double z, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double residual(double z) {
  const double w = lambert_w0(z);
  return std::abs(w * std::exp(w) - z);
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("lambert w0 defining identities") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
  }

  TEST_CASE("lambert w0 at 1 matches a bisection oracle") {
    const double oracle = lambert_by_bisection(1.0, 0.0, 1.0);
    CHECK(lambert_w0(1.0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(lambert_w0(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-15));
  }

  TEST_CASE("lambert w0 residual over the full grid") {
    // log-spaced z in [-1/e, 1e6] plus a cluster hugging the branch point
    const double inv_e = std::exp(-1.0);
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double t = static_cast<double>(i) / 10000.0;
      const double z = -inv_e + (1e6 + inv_e) * (std::pow(10.0, 8.0 * t) - 1.0) / (1e8 - 1.0);
      worst = std::max(worst, residual(z) / std::max(1.0, std::abs(z)));
    }
    for (int i = 1; i <= 100; ++i) {
      const double z = -inv_e + 1e-6 * i / 100.0;
      worst = std::max(worst, residual(z) / std::max(1.0, std::abs(z)));
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("lambert w0 is monotone on its domain") {
    double previous = -1.0;
    for (int i = 0; i <= 2000; ++i) {
      const double z = -std::exp(-1.0) + (1e4 + std::exp(-1.0)) * i / 2000.0;
      const double w = lambert_w0(z);
      CHECK(w >= previous - 1e-13);
      previous = w;
    }
  }

  TEST_CASE("lambert w0 rejects arguments below the branch point") {
    CHECK_THROWS_AS((void)lambert_w0(-0.5), error);
    CHECK_THROWS_AS((void)lambert_w0(-std::exp(-1.0) - 1e-6), error);
  }

  TEST_CASE("maximize_1d finds a quadratic peak") {
    const auto result = maximize_1d([](double x) { return -(x - 3.0) * (x - 3.0); }, 0.0, 10.0, 1e-8);
    CHECK(result.argmax == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(result.max == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }

  TEST_CASE("maximize_1d matches the 1-level Lambert-W optimum") {
    // single-level U(T) has the closed-form maximizer c + (W(-e^{-lc-1})+1)/l
    const double rate = mlckpt::testing::per_day(50.5);
    const double cost = 50.0;
    const LevelSpec level{rate, cost, cost};
    const auto result = maximize_1d(
        [&](double t) { return evaluate_1level(level, t).utilization; }, cost + 1.0, 20000.0, 1e-4);
    const double closed_form = cost + (lambert_w0(-std::exp(-rate * cost - 1.0)) + 1.0) / rate;
    CHECK(std::abs(result.argmax - closed_form) < 0.01);
  }

  TEST_CASE("maximize_1d on a constant returns the constant") {
    const auto result = maximize_1d([](double) { return 4.25; }, -1.0, 1.0, 1e-9);
    CHECK(result.max == 4.25);
    CHECK(result.argmax >= -1.0);
    CHECK(result.argmax <= 1.0);
  }

  TEST_CASE("maximize_1d recovers random concave quadratic maximizers") {
    Philox4x64 rng(2024, 7);
    for (int trial = 0; trial < 50; ++trial) {
      const double peak = -5.0 + 10.0 * rng.next_unit();
      const double curvature = 0.1 + 5.0 * rng.next_unit();
      const auto result = maximize_1d(
          [&](double x) { return -curvature * (x - peak) * (x - peak); }, -6.0, 6.0, 1e-7);
      CHECK(std::abs(result.argmax - peak) < 1e-6);
    }
  }

  TEST_CASE("maximize_1d propagates non-finite evaluations as errors") {
    CHECK_THROWS_AS((void)maximize_1d([](double x) { return x > 0.5 ? 1.0 / 0.0 : x; }, 0.0, 1.0, 1e-6),
                    error);
    CHECK_THROWS_AS((void)maximize_1d([](double) { return 1.0; }, 1.0, 0.0, 1e-6), error);
  }

  TEST_CASE("expm1_minus_x agrees with the direct form across scales") {
    for (double x : {1e-8, 1e-6, 1e-4, 5e-4, 2e-3, 0.1, 1.0, 5.0}) {
      const double exact = std::expm1(x) - x;  // fine at these magnitudes
      CHECK(expm1_minus_x(x) == doctest::Approx(exact).epsilon(1e-9));
    }
    // series region: compare against the leading behaviour x^2/2
    CHECK(expm1_minus_x(1e-9) == doctest::Approx(0.5e-18).epsilon(1e-6));
  }
}
