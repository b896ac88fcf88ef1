#include "mlckpt/numerics.hpp"

#include <cmath>
#include <limits>

#include "mlckpt/errors.hpp"

namespace mlckpt {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// w = -1 + p - p^2/3 + 11 p^3/72 - 43 p^4/540, p = sqrt(2(ez+1));
// the standard expansion around the branch point.
double branch_point_series(double z) {
  const double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * (43.0 / 540.0))));
}

double initial_guess(double z, double distance, double threshold) {
  if (distance <= threshold) return branch_point_series(z);
  if (z > std::exp(1.0)) {
    const double l = std::log(z);
    return l - std::log(l);
  }
  if (z >= 0.5) return std::log1p(z);
  return z * (1.0 - z);
}

}  // namespace

double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-3) {
    // x^2/2 (1 + x/3 + x^2/12 + x^3/60 + x^4/360); truncation < 1e-18 rel here
    return 0.5 * x * x *
           (1.0 + x * (1.0 / 3.0 + x * (1.0 / 12.0 + x * (1.0 / 60.0 + x / 360.0))));
  }
  return std::expm1(x) - x;
}

double lambert_w0(double z, const BranchPointPolicy& policy) {
  if (std::isnan(z)) fail(errc::domain_error, "lambert_w0: NaN argument");
  const double distance = z + kInvE;
  if (distance < -4.0 * std::numeric_limits<double>::epsilon()) {
    fail(errc::domain_error, "lambert_w0: argument below -1/e");
  }
  if (z == 0.0) return 0.0;
  // So close to the branch point that Halley's denominator is dominated by
  // rounding noise; the series is already exact to double precision there.
  if (std::abs(distance) <= 1e-12) return branch_point_series(std::max(z, -kInvE));

  double w = initial_guess(z, distance, policy.series_threshold);
  for (int it = 0; it < policy.max_iterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double fp = ew * (w + 1.0);
    const double step = f / (fp - f * (w + 2.0) / (2.0 * (w + 1.0)));
    const double next = w - step;
    if (!std::isfinite(next)) fail(errc::no_convergence, "lambert_w0: iteration left the domain");
    w = next;
    if (std::abs(step) <= policy.tolerance * std::max(1.0, std::abs(w))) {
      return w;
    }
  }
  fail(errc::no_convergence, "lambert_w0: Halley iteration did not converge");
}

Maximum1d maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) fail(errc::invalid_argument, "maximize_1d: requires lo < hi");
  if (!(tol > 0.0)) fail(errc::invalid_argument, "maximize_1d: requires tol > 0");
  const auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) fail(errc::invalid_argument, "maximize_1d: non-finite objective value");
    return v;
  };

  // 64-interval pre-scan to bracket a maximizer even for non-unimodal f.
  constexpr int kCells = 64;
  double best_x = lo;
  double best_v = eval(lo);
  for (int i = 1; i <= kCells; ++i) {
    const double x = lo + (hi - lo) * i / kCells;
    const double v = eval(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double cell = (hi - lo) / kCells;
  double a = std::max(lo, best_x - cell);
  double b = std::min(hi, best_x + cell);

  constexpr double kGolden = 0.6180339887498949;  // 1/phi
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = eval(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = eval(xm);
  Maximum1d out{xm, fm};
  if (f1 > out.max) out = {x1, f1};
  if (f2 > out.max) out = {x2, f2};
  if (best_v > out.max) out = {best_x, best_v};
  return out;
}

}  // namespace mlckpt
