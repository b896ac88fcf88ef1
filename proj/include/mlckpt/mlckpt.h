/*
 * mlckpt — planning toolkit for probabilistic multi-level checkpointing.
 *
 * C interface over the C++ core: opaque handles, status codes, plain structs.
 * Every function returns MLCKPT_OK or a status; mlckpt_last_error() carries a
 * human-readable detail message for the most recent failure on this thread.
 *
 * Units: failure rates in failures per second, all times in seconds.
 * Levels are 1-based in parameters named `level`; arrays are indexed 0..L-1
 * with index l-1 holding level l.
 */
#ifndef MLCKPT_H
#define MLCKPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MLCKPT_API __declspec(dllexport)
#else
#define MLCKPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlckpt_status {
  MLCKPT_OK = 0,
  MLCKPT_ERR_INVALID_ARGUMENT = 1,
  MLCKPT_ERR_INFEASIBLE_POLICY = 2,
  MLCKPT_ERR_UNRECOVERABLE_LEVEL = 3,
  MLCKPT_ERR_POLICY_DIVERGES = 4,
  MLCKPT_ERR_DOMAIN = 5,
  MLCKPT_ERR_NO_CONVERGENCE = 6,
  MLCKPT_ERR_IO = 7
} mlckpt_status;

typedef struct mlckpt_system mlckpt_system;
typedef struct mlckpt_policy mlckpt_policy;

MLCKPT_API const char* mlckpt_last_error(void);
MLCKPT_API const char* mlckpt_status_name(mlckpt_status status);
MLCKPT_API const char* mlckpt_version(void);

/* ---- system / policy handles ------------------------------------------- */

MLCKPT_API mlckpt_status mlckpt_system_create(const double* failure_rates_per_second,
                                              const double* checkpoint_costs_seconds,
                                              const double* restart_costs_seconds, size_t levels,
                                              int allow_unordered_levels, mlckpt_system** out);
MLCKPT_API mlckpt_status mlckpt_system_set_topology(mlckpt_system* system,
                                                    int critical_path_operators,
                                                    double hop_delay_seconds);
MLCKPT_API size_t mlckpt_system_levels(const mlckpt_system* system);
MLCKPT_API void mlckpt_system_destroy(mlckpt_system* system);

MLCKPT_API mlckpt_status mlckpt_policy_create(double interval_seconds, const double* probabilities,
                                              size_t levels, mlckpt_policy** out);
MLCKPT_API void mlckpt_policy_destroy(mlckpt_policy* policy);

/* ---- closed-form evaluation --------------------------------------------- */

typedef struct mlckpt_evaluation {
  double utilization;
  double effective_period;
  double mean_checkpoint_cost;
} mlckpt_evaluation;

/* recovery_costs: optional out array of length mlckpt_system_levels(). */
MLCKPT_API mlckpt_status mlckpt_evaluate(const mlckpt_system* system, const mlckpt_policy* policy,
                                         mlckpt_evaluation* out, double* recovery_costs);
MLCKPT_API mlckpt_status mlckpt_evaluate_no_failure(const mlckpt_system* system,
                                                    const mlckpt_policy* policy,
                                                    mlckpt_evaluation* out);

/* ---- optimization -------------------------------------------------------- */

typedef struct mlckpt_optimizer_config {
  double interval_lo;        /* <= 0: default max cost + 1 s */
  double interval_hi;        /* <= 0: default min(10/lambda_1, 1e6) s */
  int multistarts;           /* <= 0: default 8 */
  double simplex_tolerance;  /* <= 0: default 1e-12 */
  double interval_tolerance; /* <= 0: default 0.01 s */
  uint64_t seed;
} mlckpt_optimizer_config;

typedef struct mlckpt_optimization_summary {
  double best_interval;
  double best_utilization;
  double plateau_width;
  long long evaluations;
  int restarts_used;
  int converged;
} mlckpt_optimization_summary;

/* config may be NULL for defaults; best_probabilities has length
 * mlckpt_system_levels(). */
MLCKPT_API mlckpt_status mlckpt_optimize(const mlckpt_system* system,
                                         const mlckpt_optimizer_config* config,
                                         mlckpt_optimization_summary* out,
                                         double* best_probabilities);
MLCKPT_API mlckpt_status mlckpt_optimize_fixed_interval(const mlckpt_system* system,
                                                        double interval_seconds,
                                                        const mlckpt_optimizer_config* config,
                                                        mlckpt_optimization_summary* out,
                                                        double* best_probabilities);
MLCKPT_API mlckpt_status mlckpt_optimize_fixed_probabilities(const mlckpt_system* system,
                                                             const double* probabilities,
                                                             const mlckpt_optimizer_config* config,
                                                             mlckpt_optimization_summary* out);
/* One comparison row: optimize using only checkpoint levels {1..levels_used-1, L}.
 * pct_increase reports the gain over the levels_used == 1 baseline. */
MLCKPT_API mlckpt_status mlckpt_compare_levels(const mlckpt_system* system,
                                               const mlckpt_optimizer_config* config,
                                               int levels_used,
                                               mlckpt_optimization_summary* out,
                                               double* probabilities, double* pct_increase);

/* ---- Lambert-W approximations (L == 2) ----------------------------------- */

MLCKPT_API mlckpt_status mlckpt_approx_interval(const mlckpt_system* system, double p1,
                                                double* out);
MLCKPT_API mlckpt_status mlckpt_approx_p1(const mlckpt_system* system, double interval_seconds,
                                          double* out);
MLCKPT_API mlckpt_status mlckpt_approx_fixed_point(const mlckpt_system* system,
                                                   double* interval_out, double* p1_out,
                                                   int* converged_out);

/* ---- stochastic simulation ------------------------------------------------ */

typedef struct mlckpt_simulation_config {
  double duration_seconds;    /* <= 0: default 1000/lambda_L */
  int replicas;               /* <= 0: default 100 */
  uint64_t seed;
  int restart_failure_scope;  /* 0 = paper assumption, 1 = all levels */
  const char* event_log_path; /* optional JSONL dump; NULL to disable */
  const int* level_sequence;  /* optional deterministic levels (1-based), cycled */
  size_t level_sequence_len;
  int max_threads;            /* <= 0: hardware concurrency */
} mlckpt_simulation_config;

typedef struct mlckpt_simulation_summary {
  double mean;
  double std_dev;
  double duration;
  uint64_t failures_total;
  uint64_t checkpoints_completed;
  uint64_t checkpoints_discarded;
  uint64_t restart_attempts;
} mlckpt_simulation_summary;

/* per_replica_utilization (length replicas) and per_level_failures (length
 * mlckpt_system_levels()) are optional out arrays. */
MLCKPT_API mlckpt_status mlckpt_simulate(const mlckpt_system* system, const mlckpt_policy* policy,
                                         const mlckpt_simulation_config* config,
                                         mlckpt_simulation_summary* out,
                                         double* per_replica_utilization,
                                         uint64_t* per_level_failures);

typedef enum mlckpt_sweep_axis {
  MLCKPT_SWEEP_INTERVAL = 0,
  MLCKPT_SWEEP_PROBABILITY = 1,
  MLCKPT_SWEEP_OPERATORS = 2,
  MLCKPT_SWEEP_FAILURE_RATE = 3
} mlckpt_sweep_axis;

/* `out` has length `count`; `level` is the 1-based level a probability or
 * failure-rate axis moves (ignored otherwise). */
MLCKPT_API mlckpt_status mlckpt_simulate_sweep(const mlckpt_system* system,
                                               const mlckpt_policy* policy,
                                               const mlckpt_simulation_config* config,
                                               mlckpt_sweep_axis axis, int level,
                                               const double* values, size_t count,
                                               mlckpt_simulation_summary* out);

/* ---- numerics -------------------------------------------------------------- */

MLCKPT_API mlckpt_status mlckpt_lambert_w0(double z, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MLCKPT_H */
