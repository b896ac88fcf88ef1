#include "mlckpt/model.hpp"

#include <cmath>
#include <string>

#include "mlckpt/numerics.hpp"

namespace mlckpt {

namespace {

double mean_checkpoint_cost(const SystemSpec& spec, const Policy& policy) {
  double mean = 0.0;
  for (std::size_t i = 0; i < spec.level_count(); ++i) {
    mean += policy.probabilities[i] * spec.level(i).checkpoint_cost;
  }
  return mean;
}

// One restart attempt loop from a level-(index+1) checkpoint:
// r + (1/q_{r,L} - 1) F_L(r) collapses exactly to expm1(L r)/L.
double restart_loop_cost(double restart_cost, double cumulative_rate) {
  if (restart_cost <= 0.0) return 0.0;
  if (cumulative_rate <= 0.0) return restart_cost;
  return std::expm1(cumulative_rate * restart_cost) / cumulative_rate;
}

double recovery_cost_unchecked(const SystemSpec& spec, const Policy& policy, int failure_level) {
  const std::size_t n = spec.level_count();
  double suffix = 0.0;
  for (std::size_t i = static_cast<std::size_t>(failure_level) - 1; i < n; ++i) {
    suffix += policy.probabilities[i];
  }
  double cost = 0.0;
  for (std::size_t i = static_cast<std::size_t>(failure_level) - 1; i < n; ++i) {
    const double weight = policy.probabilities[i] / suffix;
    if (weight == 0.0) continue;
    cost += weight * restart_loop_cost(spec.level(i).restart_cost, spec.cumulative_rate(i));
  }
  return cost;
}

std::vector<double> all_recovery_costs(const SystemSpec& spec, const Policy& policy) {
  std::vector<double> costs(spec.level_count(), 0.0);
  double suffix = 0.0;
  for (std::size_t i = spec.level_count(); i-- > 0;) {
    suffix += policy.probabilities[i];
    costs[i] = suffix > 0.0 ? recovery_cost_unchecked(spec, policy, static_cast<int>(i) + 1) : 0.0;
  }
  return costs;
}

// Shared L-level evaluation with completion lag `lag` = (n-1)*delta (zero for
// a single process). Solves the effective-period recursion
//   T_eff = T + A F(T') - B F(lag) + (A - B)(rec + lost * T_eff)
// with A = expm1(L T'), B = expm1(L lag), using the exact rewrites
//   A F(T')          = (expm1(L T') - L T') / L
//   A F(T')-B F(lag) = (expm1_minus_x(L T) + expm1(L lag) expm1(L T)) / L
//   A - B            = e^{L lag} expm1(L T)
// so small rates never cancel catastrophically.
Evaluation evaluate_with_lag(const SystemSpec& spec, const Policy& policy, double lag) {
  validate_policy(spec, policy);
  const std::size_t n = spec.level_count();
  const double total_rate = spec.total_failure_rate();
  const double interval = policy.interval;
  const double mean_cost = mean_checkpoint_cost(spec, policy);

  Evaluation out;
  out.mean_checkpoint_cost = mean_cost;
  out.per_level_recovery_cost = all_recovery_costs(spec, policy);
  if (total_rate <= 0.0) {
    out.effective_period = interval;
    out.utilization = (interval - mean_cost) / interval;
    return out;
  }

  double recovery_sum = 0.0;  // sum over levels of (lambda_l / Lambda) R_l
  double lost_sum = 0.0;      // sum over levels of (lambda_l / Lambda) S_{<l}/S_{>=l}
  // suffix sums accumulated from the back; subtracting from 1 instead would
  // cancel catastrophically when a tail probability is near machine epsilon
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + policy.probabilities[i];
  double prefix = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = spec.level(i).failure_rate;
    if (rate > 0.0) {
      recovery_sum += rate / total_rate * out.per_level_recovery_cost[i];
      lost_sum += rate / total_rate * (prefix / suffix[i]);
    }
    prefix += policy.probabilities[i];
  }

  const double x = total_rate * interval;
  const double growth = std::expm1(total_rate * lag);  // 0 when lag == 0
  const double consecutive = (1.0 + growth) * std::expm1(x);  // A - B
  const double lost_mean_time =
      (expm1_minus_x(x) + growth * std::expm1(x)) / total_rate;  // A F(T') - B F(lag)

  // the conditionals keep 0 * inf out when a sum is empty and x overflows;
  // lost_sum is non-negative by construction
  const double rework = recovery_sum > 0.0 ? consecutive * recovery_sum : 0.0;
  const double numerator = interval + lost_mean_time + rework;
  const double denominator = lost_sum != 0.0 ? 1.0 - consecutive * lost_sum : 1.0;
  if (!(denominator > 0.0)) {
    fail(errc::policy_diverges,
         "policy diverges: expected rework per period exceeds progress "
         "(effective-period denominator " +
             std::to_string(denominator) + " <= 0)");
  }
  out.effective_period = numerator / denominator;
  out.utilization = (interval - mean_cost) / out.effective_period;
  return out;
}

void require_two_levels(const SystemSpec& spec, const char* who) {
  if (spec.level_count() != 2) {
    fail(errc::invalid_argument, std::string(who) + ": requires exactly two levels");
  }
}

// Shared printed-closed-form evaluation for 2 levels with completion lag
// (Eq. with lag == 0 is the single-process special case). Rewrites used,
// each an exact identity of the printed expression:
//   lambda2 (p1 e^{TL} - 1) - lambda1 p2      = lambda2 p1 expm1(TL) - p2 L
//   e^{r2 L}(lambda2 + lambda1 p2) - lambda2 p1 + L p1 e^{lambda1 r1}
//     = L + expm1(r2 L)(lambda2 + lambda1 p2) + L p1 expm1(lambda1 r1)
//   e^{L(T+lag)} - e^{L lag} + 1              = e^{L lag} expm1(TL) + 1
Evaluation evaluate_2level_printed(const SystemSpec& spec, const Policy& policy, double lag) {
  require_two_levels(spec, "evaluate_2level");
  validate_policy(spec, policy);
  const double p1 = policy.probabilities[0];
  const double p2 = policy.probabilities[1];
  if (!(p2 > 0.0)) {
    fail(errc::unrecoverable_level,
         "evaluate_2level: p_2 must be positive (level-2 failures need level-2 checkpoints)");
  }
  const double l1 = spec.level(0).failure_rate;
  const double l2 = spec.level(1).failure_rate;
  const double r1 = spec.level(0).restart_cost;
  const double r2 = spec.level(1).restart_cost;
  const double total_rate = l1 + l2;
  const double interval = policy.interval;
  const double mean_cost = mean_checkpoint_cost(spec, policy);

  Evaluation out;
  out.mean_checkpoint_cost = mean_cost;
  out.per_level_recovery_cost = all_recovery_costs(spec, policy);
  if (total_rate <= 0.0) {
    out.effective_period = interval;
    out.utilization = (interval - mean_cost) / interval;
    return out;
  }

  const double x = total_rate * interval;
  const double growth = std::exp(total_rate * lag);
  // numerator bracket: p2 L - lambda2 p1 e^{L lag} expm1(TL); <= 0 means the
  // lost-checkpoint feedback outruns progress (same divergence condition as
  // the recursion denominator).
  const double feedback = l2 * p1 > 0.0 ? l2 * p1 * growth * std::expm1(x) : 0.0;
  const double bracket = p2 * total_rate - feedback;
  if (!(bracket > 0.0)) {
    fail(errc::policy_diverges, "policy diverges: lost-checkpoint feedback exceeds progress");
  }
  const double restart_factor = total_rate + std::expm1(r2 * total_rate) * (l2 + l1 * p2) +
                                (p1 > 0.0 ? total_rate * p1 * std::expm1(l1 * r1) : 0.0);
  out.utilization = (1.0 / growth) * total_rate * (interval - mean_cost) * bracket /
                    (p2 * std::expm1(x) * restart_factor);
  out.effective_period = (interval - mean_cost) / out.utilization;
  return out;
}

}  // namespace

double survival_probability(double duration, double rate) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    fail(errc::invalid_argument, "survival_probability: duration must be finite and >= 0");
  }
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    fail(errc::invalid_argument, "survival_probability: rate must be finite and >= 0");
  }
  return std::exp(-rate * duration);
}

double conditional_mttf(double horizon, double rate) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(errc::invalid_argument,
         "conditional_mttf: horizon must be finite and > 0 (conditioning on a zero-probability "
         "event otherwise)");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    fail(errc::invalid_argument, "conditional_mttf: rate must be finite and > 0");
  }
  const double x = rate * horizon;
  if (x > 700.0) return 1.0 / rate;  // e^x overflows; conditioning has vanished
  return expm1_minus_x(x) / (rate * std::expm1(x));
}

double recovery_cost(const SystemSpec& spec, const Policy& policy, int failure_level) {
  if (failure_level < 1 || static_cast<std::size_t>(failure_level) > spec.level_count()) {
    fail(errc::invalid_argument, "recovery_cost: failure level out of range");
  }
  if (policy.probabilities.size() != spec.level_count()) {
    fail(errc::invalid_argument, "recovery_cost: probability count must match the level count");
  }
  double suffix = 0.0;
  for (std::size_t i = static_cast<std::size_t>(failure_level) - 1; i < spec.level_count(); ++i) {
    const double p = policy.probabilities[i];
    if (!(p >= 0.0)) fail(errc::invalid_argument, "recovery_cost: probabilities must be >= 0");
    suffix += p;
  }
  if (!(suffix > 0.0)) {
    fail(errc::unrecoverable_level, "recovery_cost: no recoverable checkpoint type for level " +
                                        std::to_string(failure_level));
  }
  return recovery_cost_unchecked(spec, policy, failure_level);
}

Evaluation utilization_no_failure(const SystemSpec& spec, const Policy& policy) {
  validate_policy(spec, policy);
  const double mean_cost = mean_checkpoint_cost(spec, policy);
  Evaluation out;
  out.mean_checkpoint_cost = mean_cost;
  out.per_level_recovery_cost.assign(spec.level_count(), 0.0);
  out.effective_period = policy.interval + spec.completion_lag();
  out.utilization = (policy.interval - mean_cost) / out.effective_period;
  return out;
}

Evaluation evaluate_2level(const SystemSpec& spec, const Policy& policy) {
  return evaluate_2level_printed(spec, policy, 0.0);
}

Evaluation evaluate_1level(const LevelSpec& level, double interval) {
  if (!(interval > level.checkpoint_cost)) {
    fail(errc::infeasible_policy, "evaluate_1level: interval must exceed the checkpoint cost");
  }
  const SystemSpec spec({level});
  return evaluate_llevel(spec, Policy{interval, {1.0}});
}

Evaluation evaluate_llevel(const SystemSpec& spec, const Policy& policy) {
  return evaluate_with_lag(spec, policy, 0.0);
}

Evaluation evaluate_2level_stream(const SystemSpec& spec, const Policy& policy) {
  if (!spec.topology()) {
    fail(errc::invalid_argument, "evaluate_2level_stream: requires a topology");
  }
  return evaluate_2level_printed(spec, policy, spec.completion_lag());
}

Evaluation evaluate_llevel_stream(const SystemSpec& spec, const Policy& policy) {
  if (!spec.topology()) {
    fail(errc::invalid_argument, "evaluate_llevel_stream: requires a topology");
  }
  return evaluate_with_lag(spec, policy, spec.completion_lag());
}

Evaluation evaluate(const SystemSpec& spec, const Policy& policy) {
  return evaluate_with_lag(spec, policy, spec.completion_lag());
}

double approx_optimal_interval(const SystemSpec& spec, double p1) {
  require_two_levels(spec, "approx_optimal_interval");
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    fail(errc::invalid_argument, "approx_optimal_interval: p1 must lie in [0, 1]");
  }
  const double l1 = spec.level(0).failure_rate;
  if (!(l1 > 0.0)) {
    fail(errc::invalid_argument, "approx_optimal_interval: level-1 failure rate must be > 0");
  }
  const double c1 = spec.level(0).checkpoint_cost;
  const double c2 = spec.level(1).checkpoint_cost;
  const double mean_cost = c1 * p1 + c2 * (1.0 - p1);
  const double w = lambert_w0(-std::exp(-l1 * mean_cost - 1.0));
  return mean_cost + (w + 1.0) / l1;
}

double approx_optimal_p1(const SystemSpec& spec, double interval) {
  require_two_levels(spec, "approx_optimal_p1");
  const double l1 = spec.level(0).failure_rate;
  const double l2 = spec.level(1).failure_rate;
  const double c1 = spec.level(0).checkpoint_cost;
  const double c2 = spec.level(1).checkpoint_cost;
  if (!(interval >= c1)) {
    fail(errc::invalid_argument, "approx_optimal_p1: interval must be at least c_1");
  }
  const double total_rate = l1 + l2;
  const double grown = std::expm1(interval * total_rate);
  if (spec.topology()) {
    const double delta = spec.topology()->hop_delay;
    const double ops = spec.topology()->critical_path_operators;
    const double denom = (c2 - c1) * (total_rate * std::exp(delta * total_rate) -
                                      l2 * std::exp(delta * ops * total_rate) +
                                      l2 * std::exp(total_rate * (interval + delta * ops)));
    return 1.0 - std::exp(delta * ops * total_rate / 2.0) *
                     std::sqrt(l2 * (interval - c1) * grown / denom);
  }
  const double denom = (c2 - c1) * (l1 + l2 * (grown + 1.0));
  return 1.0 - std::sqrt(l2 * (interval - c1) * grown / denom);
}

ApproxFixedPoint approx_fixed_point(const SystemSpec& spec, int max_iterations) {
  require_two_levels(spec, "approx_fixed_point");
  ApproxFixedPoint fp;
  fp.p1 = 0.5;
  fp.interval = approx_optimal_interval(spec, fp.p1);
  for (int it = 1; it <= max_iterations; ++it) {
    double p1 = approx_optimal_p1(spec, fp.interval);
    p1 = std::min(std::max(p1, 0.0), 1.0 - 1e-12);
    const double interval = approx_optimal_interval(spec, p1);
    const bool settled = std::abs(interval - fp.interval) <= 1e-10 * std::max(1.0, interval) &&
                         std::abs(p1 - fp.p1) <= 1e-12;
    fp.interval = interval;
    fp.p1 = p1;
    fp.iterations = it;
    if (settled) {
      fp.converged = true;
      break;
    }
  }
  return fp;
}

}  // namespace mlckpt
