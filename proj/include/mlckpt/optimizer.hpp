#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlckpt/types.hpp"

namespace mlckpt {

struct OptimizerConfig {
  double interval_lo = 0.0;  ///< <= 0 selects max_l c_l + 1 s
  double interval_hi = 0.0;  ///< <= 0 selects min(10/lambda_1, 1e6) s
  int multistarts = 8;
  double simplex_tolerance = 1e-12;   ///< Nelder-Mead objective spread
  double interval_tolerance = 0.01;   ///< seconds, refinement convergence on T
  std::uint64_t seed = 1;
};

struct OptimizationResult {
  Policy best_policy;
  double best_utilization = 0.0;
  long evaluations = 0;
  int restarts_used = 0;
  bool converged = false;
  /// Width of the T range (at the best probabilities) whose utilization stays
  /// within 1e-4 of the best; the plateau the paper's heatmap shows.
  std::optional<double> plateau_width;
};

/// Maximize utilization over (T, p): multistart Nelder-Mead on
/// (log T, softmax-parameterized simplex), each start refined by cyclic
/// golden-section on T and pairwise simplex-edge searches on p. Deterministic
/// given the seed; divergent policies score -inf so the search routes around
/// them. Uses the stream evaluator when the spec has a topology.
OptimizationResult optimize(const SystemSpec& spec, const OptimizerConfig& config = {});

/// Conditional optimum over the simplex at a pinned interval.
OptimizationResult optimize_fixed_interval(const SystemSpec& spec, double interval,
                                           const OptimizerConfig& config = {});

/// Conditional optimum over the interval at pinned probabilities.
OptimizationResult optimize_fixed_probabilities(const SystemSpec& spec,
                                                std::span<const double> probabilities,
                                                const OptimizerConfig& config = {});

struct LevelComparisonRow {
  int levels_used = 0;
  Policy policy;  ///< probabilities over all L levels; unavailable ones are 0
  double utilization = 0.0;
  double pct_increase = 0.0;  ///< percent gain over the levels_used == 1 row
};

/// For k = 1..L, optimize with only checkpoint levels {1..k-1, L} available:
/// the dropped intermediate tiers keep their failure rates but are never
/// checkpointed (their p pinned to 0), matching the paper's 1-level and
/// 2-level baselines.
std::vector<LevelComparisonRow> compare_levels(const SystemSpec& spec,
                                               const OptimizerConfig& config = {});

/// Single comparison row (computes only row k and the k = 1 baseline).
LevelComparisonRow compare_levels_row(const SystemSpec& spec, const OptimizerConfig& config,
                                      int levels_used);

}  // namespace mlckpt
