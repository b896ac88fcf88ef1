#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlckpt/types.hpp"

namespace mlckpt {

/// Which failure levels may fire while a restart from a level-i checkpoint is
/// in progress. Under `paper_assumption` only levels <= i are active; the
/// clocks of higher levels pause for the restart (no mass lost or deferred).
/// Under `all_levels` every level stays active and a deeper failure during a
/// restart re-routes recovery to a sufficient checkpoint.
enum class RestartFailureScope { paper_assumption, all_levels };

struct SimulationConfig {
  double duration = 0.0;  ///< seconds; <= 0 selects the default 1000/lambda_L
  int replicas = 100;
  std::uint64_t seed = 0;
  RestartFailureScope restart_failure_scope = RestartFailureScope::paper_assumption;
  /// Optional deterministic checkpoint-level override (1-based, cycled);
  /// empty means sample i.i.d. from the policy.
  std::vector<int> level_sequence;
  /// Optional JSONL event dump: one record per event with fields
  /// t, kind, level, period. See README for the kind vocabulary.
  std::string event_log_path;
  int max_threads = 0;  ///< <= 0 selects hardware concurrency
};

/// Wall-clock attribution per replica; the four buckets partition the run:
/// useful + checkpointing + lost + restarting == duration.
struct TimeBuckets {
  double useful = 0.0;
  double checkpointing = 0.0;
  double lost = 0.0;
  double restarting = 0.0;
};

struct EventCounts {
  std::vector<std::uint64_t> failures;  ///< per level
  std::uint64_t checkpoints_completed = 0;
  /// In-flight checkpoints killed by a failure plus completed checkpoints
  /// invalidated by a rollback past them.
  std::uint64_t checkpoints_discarded = 0;
  std::uint64_t restart_attempts = 0;
};

struct SimulationReport {
  std::vector<double> per_replica_utilization;
  double mean = 0.0;
  double std_dev = 0.0;  ///< sample standard deviation over replicas
  EventCounts event_counts;
  std::vector<TimeBuckets> per_replica_buckets;
  double duration = 0.0;  ///< resolved per-replica wall-clock horizon
};

/// Event-driven replay of the probabilistic multi-level checkpoint/restart
/// process; replicas are independent Philox streams and the report is
/// bit-identical regardless of thread count.
SimulationReport simulate(const SystemSpec& spec, const Policy& policy,
                          const SimulationConfig& config);

enum class SweepAxis { interval, probability, operators, failure_rate };

/// One report per axis value. `level` picks which p_l or lambda_l the axis
/// moves (1-based; ignored for interval/operators). Probability sweeps
/// rescale the remaining levels proportionally. Replica streams are keyed by
/// (seed, axis, level, value, replica), so points are independent but
/// reproducible.
std::vector<SimulationReport> simulate_sweep(const SystemSpec& spec, const Policy& policy,
                                             const SimulationConfig& config, SweepAxis axis,
                                             int level, std::span<const double> values);

}  // namespace mlckpt
