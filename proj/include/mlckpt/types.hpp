#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlckpt/errors.hpp"

namespace mlckpt {

inline constexpr double seconds_per_day = 86400.0;

/// One checkpoint level: failure rate in failures per second, checkpoint and
/// restart costs in seconds. Level 1 is the cheapest, most failure-prone tier.
struct LevelSpec {
  double failure_rate = 0.0;
  double checkpoint_cost = 0.0;
  double restart_cost = 0.0;
};

/// Stream topology reduced to its critical path: n operators and the per-hop
/// token delay. A global checkpoint is fully complete (n-1)*hop_delay after
/// the first operator completes it.
struct TopologySpec {
  int critical_path_operators = 1;
  double hop_delay = 0.0;
};

/// Validated, immutable system description: levels ordered 1..L plus an
/// optional stream topology.
class SystemSpec {
 public:
  /// Validates per-level invariants (failure_rate >= 0, checkpoint_cost > 0,
  /// restart_cost >= 0) and the cross-level orderings: failure rates strictly
  /// decreasing, checkpoint costs strictly increasing, restart costs
  /// non-decreasing. `allow_unordered_levels` skips only the cross-level
  /// orderings, for boundary-probing experiments.
  explicit SystemSpec(std::vector<LevelSpec> levels,
                      std::optional<TopologySpec> topology = std::nullopt,
                      bool allow_unordered_levels = false);

  std::size_t level_count() const noexcept { return levels_.size(); }
  std::span<const LevelSpec> levels() const noexcept { return levels_; }
  /// 0-based access; domain level l corresponds to index l-1.
  const LevelSpec& level(std::size_t index) const { return levels_.at(index); }
  const std::optional<TopologySpec>& topology() const noexcept { return topology_; }

  /// Aggregate failure rate over all levels.
  double total_failure_rate() const noexcept { return total_rate_; }
  /// Rate aggregated over levels 1..index+1 (failures a level-(index+1)
  /// restart is exposed to under the paper assumption).
  double cumulative_rate(std::size_t index) const { return prefix_rates_.at(index); }
  double max_checkpoint_cost() const noexcept;
  /// (n-1)*hop_delay; zero without a topology.
  double completion_lag() const noexcept;

 private:
  std::vector<LevelSpec> levels_;
  std::optional<TopologySpec> topology_;
  std::vector<double> prefix_rates_;
  double total_rate_ = 0.0;
};

/// Checkpoint policy: one global interval and the per-level selection
/// probabilities drawn from at every interval.
struct Policy {
  double interval = 0.0;
  std::vector<double> probabilities;
};

/// Throws unless `policy` is feasible for `spec`: sizes match, p_l >= 0,
/// sum(p) = 1 within 1e-12, interval - sum(p_l c_l) > 0, and every level with
/// a positive failure rate has some recoverable checkpoint type
/// (sum_{i>=l} p_i > 0).
void validate_policy(const SystemSpec& spec, const Policy& policy);

struct Evaluation {
  double utilization = 0.0;
  double effective_period = 0.0;
  double mean_checkpoint_cost = 0.0;
  std::vector<double> per_level_recovery_cost;
};

}  // namespace mlckpt
