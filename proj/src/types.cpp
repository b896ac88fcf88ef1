#include "mlckpt/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlckpt {

SystemSpec::SystemSpec(std::vector<LevelSpec> levels, std::optional<TopologySpec> topology,
                       bool allow_unordered_levels)
    : levels_(std::move(levels)), topology_(std::move(topology)) {
  if (levels_.empty()) fail(errc::invalid_argument, "SystemSpec: at least one level required");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const LevelSpec& l = levels_[i];
    if (!(l.failure_rate >= 0.0) || !std::isfinite(l.failure_rate)) {
      fail(errc::invalid_argument, "SystemSpec: failure_rate must be finite and >= 0");
    }
    if (!(l.checkpoint_cost > 0.0) || !std::isfinite(l.checkpoint_cost)) {
      fail(errc::invalid_argument, "SystemSpec: checkpoint_cost must be finite and > 0");
    }
    if (!(l.restart_cost >= 0.0) || !std::isfinite(l.restart_cost)) {
      fail(errc::invalid_argument, "SystemSpec: restart_cost must be finite and >= 0");
    }
  }
  if (!allow_unordered_levels) {
    for (std::size_t i = 1; i < levels_.size(); ++i) {
      if (!(levels_[i - 1].failure_rate > levels_[i].failure_rate)) {
        fail(errc::invalid_argument,
             "SystemSpec: failure rates must be strictly decreasing with level");
      }
      if (!(levels_[i - 1].checkpoint_cost < levels_[i].checkpoint_cost)) {
        fail(errc::invalid_argument,
             "SystemSpec: checkpoint costs must be strictly increasing with level");
      }
      if (!(levels_[i - 1].restart_cost <= levels_[i].restart_cost)) {
        fail(errc::invalid_argument, "SystemSpec: restart costs must be non-decreasing with level");
      }
    }
  }
  if (topology_) {
    if (topology_->critical_path_operators < 1) {
      fail(errc::invalid_argument, "TopologySpec: critical path needs at least one operator");
    }
    if (!(topology_->hop_delay >= 0.0) || !std::isfinite(topology_->hop_delay)) {
      fail(errc::invalid_argument, "TopologySpec: hop delay must be finite and >= 0");
    }
  }
  prefix_rates_.resize(levels_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    acc += levels_[i].failure_rate;
    prefix_rates_[i] = acc;
  }
  total_rate_ = acc;
}

double SystemSpec::max_checkpoint_cost() const noexcept {
  double m = 0.0;
  for (const LevelSpec& l : levels_) m = std::max(m, l.checkpoint_cost);
  return m;
}

double SystemSpec::completion_lag() const noexcept {
  if (!topology_) return 0.0;
  return (topology_->critical_path_operators - 1) * topology_->hop_delay;
}

void validate_policy(const SystemSpec& spec, const Policy& policy) {
  const std::size_t n = spec.level_count();
  if (policy.probabilities.size() != n) {
    fail(errc::invalid_argument, "Policy: probability count must match the level count");
  }
  if (!(policy.interval > 0.0) || !std::isfinite(policy.interval)) {
    fail(errc::invalid_argument, "Policy: interval must be finite and > 0");
  }
  double sum = 0.0;
  for (double p : policy.probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      fail(errc::invalid_argument, "Policy: probabilities must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    fail(errc::invalid_argument, "Policy: probabilities must sum to 1 within 1e-12");
  }
  double mean_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_cost += policy.probabilities[i] * spec.level(i).checkpoint_cost;
  }
  if (!(policy.interval - mean_cost > 0.0)) {
    fail(errc::infeasible_policy,
         "Policy: interval must exceed the expected checkpoint cost (T - sum p_l c_l > 0)");
  }
  // every failure level needs some recoverable checkpoint type
  double suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix += policy.probabilities[i];
    if (spec.level(i).failure_rate > 0.0 && suffix <= 0.0) {
      fail(errc::unrecoverable_level,
           "Policy: level " + std::to_string(i + 1) +
               " fails with no recoverable checkpoint type (sum of p at or above it is 0)");
    }
  }
}

}  // namespace mlckpt
