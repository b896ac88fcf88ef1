#pragma once

#include <functional>

namespace mlckpt {

/// Controls lambert_w0 behaviour near the branch point z = -1/e, where plain
/// Newton/Halley steps degrade.
struct BranchPointPolicy {
  double series_threshold = 1e-4;  ///< |z + 1/e| below which the series seeds the iteration
  int max_iterations = 50;
  double tolerance = 1e-14;
};

/// Principal-branch Lambert W: the w >= -1 with w*e^w = z. Domain z >= -1/e;
/// values below raise a domain error. Halley iteration with a branch-point
/// series seed; failing to converge within the cap is an error, never an
/// approximate return.
double lambert_w0(double z, const BranchPointPolicy& policy = {});

struct Maximum1d {
  double argmax = 0.0;
  double max = 0.0;
};

/// Golden-section maximization on [lo, hi]. A 64-interval pre-scan picks the
/// bracket, so for a non-unimodal f the result is a local maximizer around
/// the best scanned cell. Non-finite f evaluations propagate as errors.
Maximum1d maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol);

/// e^x - 1 - x evaluated without cancellation for small x.
double expm1_minus_x(double x);

}  // namespace mlckpt
