#pragma once

#include "mlckpt/types.hpp"

namespace mlckpt {

/// P[no failure within `duration`] under exponential failures at `rate`;
/// e^(-rate*duration), in (0,1]. Negative inputs are rejected.
double survival_probability(double duration, double rate);

/// Mean time to failure conditioned on one occurring within `horizon` under
/// aggregate rate `rate`:
///
///   F(T) = (e^(TL) - TL - 1) / (L (e^(TL) - 1))
///
/// computed as (expm1(TL) - TL) / (L expm1(TL)) so small TL does not cancel.
/// horizon == 0 or rate == 0 is rejected (the conditioning event has
/// probability zero). The result lies in (0, min(horizon, 1/rate)).
double conditional_mttf(double horizon, double rate);

/// Expected recovery cost of a level-`failure_level` failure (1-based):
/// weighted over recovery checkpoint levels i >= l. Each attempt loop
/// r_i + (1/q - 1) F(r_i) collapses exactly to expm1(L_i r_i)/L_i, with L_i
/// the rate aggregated over levels <= i; a zero restart cost contributes
/// nothing and a zero aggregate rate contributes r_i.
double recovery_cost(const SystemSpec& spec, const Policy& policy, int failure_level);

/// Failure-free utilization (T - sum p_l c_l) / (T + (n-1)delta); the delta
/// term vanishes without a topology.
Evaluation utilization_no_failure(const SystemSpec& spec, const Policy& policy);

/// 2-level single-process utilization via the printed closed form. Requires
/// L == 2 and p_2 > 0. Serves as an independent algebraic route against
/// evaluate_llevel, which solves the recursion instead.
Evaluation evaluate_2level(const SystemSpec& spec, const Policy& policy);

/// Single-level system checkpointing every `interval` seconds.
Evaluation evaluate_1level(const LevelSpec& level, double interval);

/// General L-level single-process utilization via the linear solve of the
/// effective-period recursion (ground truth for the closed forms).
Evaluation evaluate_llevel(const SystemSpec& spec, const Policy& policy);

/// 2-level stream utilization via the printed closed form; requires a
/// topology. Equals evaluate_2level when n == 1.
Evaluation evaluate_2level_stream(const SystemSpec& spec, const Policy& policy);

/// General L-level stream utilization with the completion-overlap correction;
/// a zero completion lag bypasses the overlap terms exactly.
Evaluation evaluate_llevel_stream(const SystemSpec& spec, const Policy& policy);

/// Dispatch: L-level stream when a topology is present, single-process
/// otherwise.
Evaluation evaluate(const SystemSpec& spec, const Policy& policy);

/// Closed-form approximations for the optimal interval and p_1 in the
/// lambda_1 >> lambda_2 regime (L == 2 only; the regime is the caller's
/// responsibility). The interval form is identical for single-process and
/// stream systems; the p_1 form gains an exp(delta n Lambda / 2) prefactor
/// when a topology is present.
double approx_optimal_interval(const SystemSpec& spec, double p1);
double approx_optimal_p1(const SystemSpec& spec, double interval);

struct ApproxFixedPoint {
  double interval = 0.0;
  double p1 = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Alternate the two approximations from p1 = 0.5 until both stabilize,
/// projecting p1 into [0, 1) when the formulas leave the regime.
ApproxFixedPoint approx_fixed_point(const SystemSpec& spec, int max_iterations = 200);

}  // namespace mlckpt
