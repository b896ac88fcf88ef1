#include "mlckpt/mlckpt.h"

#include <cstring>
#include <exception>
#include <string>

#include "mlckpt/model.hpp"
#include "mlckpt/numerics.hpp"
#include "mlckpt/optimizer.hpp"
#include "mlckpt/simulator.hpp"
#include "mlckpt/types.hpp"

struct mlckpt_system {
  mlckpt::SystemSpec spec;
};

struct mlckpt_policy {
  mlckpt::Policy policy;
};

namespace {

thread_local std::string g_last_error;

mlckpt_status map_code(mlckpt::errc code) {
  switch (code) {
    case mlckpt::errc::invalid_argument: return MLCKPT_ERR_INVALID_ARGUMENT;
    case mlckpt::errc::infeasible_policy: return MLCKPT_ERR_INFEASIBLE_POLICY;
    case mlckpt::errc::unrecoverable_level: return MLCKPT_ERR_UNRECOVERABLE_LEVEL;
    case mlckpt::errc::policy_diverges: return MLCKPT_ERR_POLICY_DIVERGES;
    case mlckpt::errc::domain_error: return MLCKPT_ERR_DOMAIN;
    case mlckpt::errc::no_convergence: return MLCKPT_ERR_NO_CONVERGENCE;
    case mlckpt::errc::io_error: return MLCKPT_ERR_IO;
  }
  return MLCKPT_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
mlckpt_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MLCKPT_OK;
  } catch (const mlckpt::error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MLCKPT_ERR_INVALID_ARGUMENT;
  }
}

mlckpt_status require(bool ok, const char* message) {
  if (ok) return MLCKPT_OK;
  g_last_error = message;
  return MLCKPT_ERR_INVALID_ARGUMENT;
}

mlckpt::OptimizerConfig to_cpp(const mlckpt_optimizer_config* config) {
  mlckpt::OptimizerConfig c;
  if (config != nullptr) {
    c.interval_lo = config->interval_lo;
    c.interval_hi = config->interval_hi;
    if (config->multistarts > 0) c.multistarts = config->multistarts;
    if (config->simplex_tolerance > 0) c.simplex_tolerance = config->simplex_tolerance;
    if (config->interval_tolerance > 0) c.interval_tolerance = config->interval_tolerance;
    c.seed = config->seed;
  }
  return c;
}

mlckpt::SimulationConfig to_cpp(const mlckpt_simulation_config* config) {
  mlckpt::SimulationConfig c;
  if (config != nullptr) {
    c.duration = config->duration_seconds;
    if (config->replicas > 0) c.replicas = config->replicas;
    c.seed = config->seed;
    c.restart_failure_scope = config->restart_failure_scope == 1
                                  ? mlckpt::RestartFailureScope::all_levels
                                  : mlckpt::RestartFailureScope::paper_assumption;
    if (config->event_log_path != nullptr) c.event_log_path = config->event_log_path;
    if (config->level_sequence != nullptr && config->level_sequence_len > 0) {
      c.level_sequence.assign(config->level_sequence,
                              config->level_sequence + config->level_sequence_len);
    }
    c.max_threads = config->max_threads;
  }
  return c;
}

void fill_summary(const mlckpt::OptimizationResult& result, mlckpt_optimization_summary* out) {
  out->best_interval = result.best_policy.interval;
  out->best_utilization = result.best_utilization;
  out->plateau_width = result.plateau_width.value_or(0.0);
  out->evaluations = result.evaluations;
  out->restarts_used = result.restarts_used;
  out->converged = result.converged ? 1 : 0;
}

void fill_summary(const mlckpt::SimulationReport& report, mlckpt_simulation_summary* out) {
  out->mean = report.mean;
  out->std_dev = report.std_dev;
  out->duration = report.duration;
  out->failures_total = 0;
  for (std::uint64_t f : report.event_counts.failures) out->failures_total += f;
  out->checkpoints_completed = report.event_counts.checkpoints_completed;
  out->checkpoints_discarded = report.event_counts.checkpoints_discarded;
  out->restart_attempts = report.event_counts.restart_attempts;
}

}  // namespace

extern "C" {

const char* mlckpt_last_error(void) { return g_last_error.c_str(); }

const char* mlckpt_status_name(mlckpt_status status) {
  switch (status) {
    case MLCKPT_OK: return "ok";
    case MLCKPT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MLCKPT_ERR_INFEASIBLE_POLICY: return "infeasible policy";
    case MLCKPT_ERR_UNRECOVERABLE_LEVEL: return "unrecoverable level";
    case MLCKPT_ERR_POLICY_DIVERGES: return "policy diverges";
    case MLCKPT_ERR_DOMAIN: return "domain error";
    case MLCKPT_ERR_NO_CONVERGENCE: return "no convergence";
    case MLCKPT_ERR_IO: return "i/o error";
  }
  return "unknown";
}

const char* mlckpt_version(void) { return "1.0.0"; }

mlckpt_status mlckpt_system_create(const double* failure_rates_per_second,
                                   const double* checkpoint_costs_seconds,
                                   const double* restart_costs_seconds, size_t levels,
                                   int allow_unordered_levels, mlckpt_system** out) {
  if (mlckpt_status s = require(out && failure_rates_per_second && checkpoint_costs_seconds &&
                                    restart_costs_seconds && levels > 0,
                                "mlckpt_system_create: null argument or zero levels");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    std::vector<mlckpt::LevelSpec> specs(levels);
    for (size_t i = 0; i < levels; ++i) {
      specs[i] = {failure_rates_per_second[i], checkpoint_costs_seconds[i],
                  restart_costs_seconds[i]};
    }
    *out = new mlckpt_system{
        mlckpt::SystemSpec(std::move(specs), std::nullopt, allow_unordered_levels != 0)};
  });
}

mlckpt_status mlckpt_system_set_topology(mlckpt_system* system, int critical_path_operators,
                                         double hop_delay_seconds) {
  if (mlckpt_status s = require(system != nullptr, "mlckpt_system_set_topology: null system");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    std::vector<mlckpt::LevelSpec> levels(system->spec.levels().begin(),
                                          system->spec.levels().end());
    system->spec = mlckpt::SystemSpec(
        std::move(levels), mlckpt::TopologySpec{critical_path_operators, hop_delay_seconds},
        /*allow_unordered_levels=*/true);
  });
}

size_t mlckpt_system_levels(const mlckpt_system* system) {
  return system ? system->spec.level_count() : 0;
}

void mlckpt_system_destroy(mlckpt_system* system) { delete system; }

mlckpt_status mlckpt_policy_create(double interval_seconds, const double* probabilities,
                                   size_t levels, mlckpt_policy** out) {
  if (mlckpt_status s = require(out && probabilities && levels > 0,
                                "mlckpt_policy_create: null argument or zero levels");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    *out = new mlckpt_policy{
        mlckpt::Policy{interval_seconds, {probabilities, probabilities + levels}}};
  });
}

void mlckpt_policy_destroy(mlckpt_policy* policy) { delete policy; }

mlckpt_status mlckpt_evaluate(const mlckpt_system* system, const mlckpt_policy* policy,
                              mlckpt_evaluation* out, double* recovery_costs) {
  if (mlckpt_status s = require(system && policy && out, "mlckpt_evaluate: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::Evaluation eval = mlckpt::evaluate(system->spec, policy->policy);
    out->utilization = eval.utilization;
    out->effective_period = eval.effective_period;
    out->mean_checkpoint_cost = eval.mean_checkpoint_cost;
    if (recovery_costs != nullptr) {
      std::memcpy(recovery_costs, eval.per_level_recovery_cost.data(),
                  eval.per_level_recovery_cost.size() * sizeof(double));
    }
  });
}

mlckpt_status mlckpt_evaluate_no_failure(const mlckpt_system* system, const mlckpt_policy* policy,
                                         mlckpt_evaluation* out) {
  if (mlckpt_status s = require(system && policy && out,
                                "mlckpt_evaluate_no_failure: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::Evaluation eval = mlckpt::utilization_no_failure(system->spec, policy->policy);
    out->utilization = eval.utilization;
    out->effective_period = eval.effective_period;
    out->mean_checkpoint_cost = eval.mean_checkpoint_cost;
  });
}

mlckpt_status mlckpt_optimize(const mlckpt_system* system, const mlckpt_optimizer_config* config,
                              mlckpt_optimization_summary* out, double* best_probabilities) {
  if (mlckpt_status s = require(system && out && best_probabilities,
                                "mlckpt_optimize: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::OptimizationResult result = mlckpt::optimize(system->spec, to_cpp(config));
    fill_summary(result, out);
    std::memcpy(best_probabilities, result.best_policy.probabilities.data(),
                result.best_policy.probabilities.size() * sizeof(double));
  });
}

mlckpt_status mlckpt_optimize_fixed_interval(const mlckpt_system* system, double interval_seconds,
                                             const mlckpt_optimizer_config* config,
                                             mlckpt_optimization_summary* out,
                                             double* best_probabilities) {
  if (mlckpt_status s = require(system && out && best_probabilities,
                                "mlckpt_optimize_fixed_interval: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::OptimizationResult result =
        mlckpt::optimize_fixed_interval(system->spec, interval_seconds, to_cpp(config));
    fill_summary(result, out);
    std::memcpy(best_probabilities, result.best_policy.probabilities.data(),
                result.best_policy.probabilities.size() * sizeof(double));
  });
}

mlckpt_status mlckpt_optimize_fixed_probabilities(const mlckpt_system* system,
                                                  const double* probabilities,
                                                  const mlckpt_optimizer_config* config,
                                                  mlckpt_optimization_summary* out) {
  if (mlckpt_status s = require(system && probabilities && out,
                                "mlckpt_optimize_fixed_probabilities: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::OptimizationResult result = mlckpt::optimize_fixed_probabilities(
        system->spec, {probabilities, system->spec.level_count()}, to_cpp(config));
    fill_summary(result, out);
  });
}

mlckpt_status mlckpt_compare_levels(const mlckpt_system* system,
                                    const mlckpt_optimizer_config* config, int levels_used,
                                    mlckpt_optimization_summary* out, double* probabilities,
                                    double* pct_increase) {
  if (mlckpt_status s = require(system && out && probabilities && pct_increase,
                                "mlckpt_compare_levels: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const auto row = mlckpt::compare_levels_row(system->spec, to_cpp(config), levels_used);
    mlckpt::OptimizationResult as_result;
    as_result.best_policy = row.policy;
    as_result.best_utilization = row.utilization;
    as_result.converged = true;
    fill_summary(as_result, out);
    out->plateau_width = 0.0;
    std::memcpy(probabilities, row.policy.probabilities.data(),
                row.policy.probabilities.size() * sizeof(double));
    *pct_increase = row.pct_increase;
  });
}

mlckpt_status mlckpt_approx_interval(const mlckpt_system* system, double p1, double* out) {
  if (mlckpt_status s = require(system && out, "mlckpt_approx_interval: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] { *out = mlckpt::approx_optimal_interval(system->spec, p1); });
}

mlckpt_status mlckpt_approx_p1(const mlckpt_system* system, double interval_seconds, double* out) {
  if (mlckpt_status s = require(system && out, "mlckpt_approx_p1: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] { *out = mlckpt::approx_optimal_p1(system->spec, interval_seconds); });
}

mlckpt_status mlckpt_approx_fixed_point(const mlckpt_system* system, double* interval_out,
                                        double* p1_out, int* converged_out) {
  if (mlckpt_status s = require(system && interval_out && p1_out,
                                "mlckpt_approx_fixed_point: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::ApproxFixedPoint fp = mlckpt::approx_fixed_point(system->spec);
    *interval_out = fp.interval;
    *p1_out = fp.p1;
    if (converged_out != nullptr) *converged_out = fp.converged ? 1 : 0;
  });
}

mlckpt_status mlckpt_simulate(const mlckpt_system* system, const mlckpt_policy* policy,
                              const mlckpt_simulation_config* config,
                              mlckpt_simulation_summary* out, double* per_replica_utilization,
                              uint64_t* per_level_failures) {
  if (mlckpt_status s = require(system && policy && out, "mlckpt_simulate: null argument");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    const mlckpt::SimulationReport report =
        mlckpt::simulate(system->spec, policy->policy, to_cpp(config));
    fill_summary(report, out);
    if (per_replica_utilization != nullptr) {
      std::memcpy(per_replica_utilization, report.per_replica_utilization.data(),
                  report.per_replica_utilization.size() * sizeof(double));
    }
    if (per_level_failures != nullptr) {
      std::memcpy(per_level_failures, report.event_counts.failures.data(),
                  report.event_counts.failures.size() * sizeof(uint64_t));
    }
  });
}

mlckpt_status mlckpt_simulate_sweep(const mlckpt_system* system, const mlckpt_policy* policy,
                                    const mlckpt_simulation_config* config, mlckpt_sweep_axis axis,
                                    int level, const double* values, size_t count,
                                    mlckpt_simulation_summary* out) {
  if (mlckpt_status s = require(system && policy && values && out && count > 0,
                                "mlckpt_simulate_sweep: null argument or empty values");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] {
    mlckpt::SweepAxis cpp_axis = mlckpt::SweepAxis::interval;
    switch (axis) {
      case MLCKPT_SWEEP_INTERVAL: cpp_axis = mlckpt::SweepAxis::interval; break;
      case MLCKPT_SWEEP_PROBABILITY: cpp_axis = mlckpt::SweepAxis::probability; break;
      case MLCKPT_SWEEP_OPERATORS: cpp_axis = mlckpt::SweepAxis::operators; break;
      case MLCKPT_SWEEP_FAILURE_RATE: cpp_axis = mlckpt::SweepAxis::failure_rate; break;
    }
    const auto reports = mlckpt::simulate_sweep(system->spec, policy->policy, to_cpp(config),
                                                cpp_axis, level, {values, count});
    for (size_t i = 0; i < reports.size(); ++i) fill_summary(reports[i], &out[i]);
  });
}

mlckpt_status mlckpt_lambert_w0(double z, double* out) {
  if (mlckpt_status s = require(out != nullptr, "mlckpt_lambert_w0: null out");
      s != MLCKPT_OK) {
    return s;
  }
  return guarded([&] { *out = mlckpt::lambert_w0(z); });
}

}  // extern "C"
