#include "mlckpt/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <thread>

#include "mlckpt/philox.hpp"

namespace mlckpt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EventRecord {
  double t;
  const char* kind;
  int level;
  long period;
};

class EventLog {
 public:
  void append(double t, const char* kind, int level, long period) {
    if (!enabled_) return;
    records_.push_back({t, kind, level, period});
  }
  void enable() { enabled_ = true; }
  bool enabled() const { return enabled_; }
  const std::vector<EventRecord>& records() const { return records_; }

 private:
  bool enabled_ = false;
  std::vector<EventRecord> records_;
};

// A completed checkpoint the system could restore from: the counters are the
// replica's (useful, checkpointing) totals at the instant the captured state
// was taken (end of its period's write phase).
struct CompletedCheckpoint {
  double complete_time;  // when all operators have it ((n-1)*delta after the write)
  int level;             // 1-based
  long period;
  double useful_snapshot;
  double checkpointing_snapshot;
};

struct ReplicaResult {
  TimeBuckets buckets;
  std::vector<std::uint64_t> failures;
  std::uint64_t checkpoints_completed = 0;
  std::uint64_t checkpoints_discarded = 0;
  std::uint64_t restart_attempts = 0;
  double utilization = 0.0;
};

class Replica {
 public:
  Replica(const SystemSpec& spec, const Policy& policy, const SimulationConfig& config,
          double duration, Philox4x64 rng, EventLog* log)
      : spec_(spec),
        policy_(policy),
        config_(config),
        duration_(duration),
        rng_(std::move(rng)),
        log_(log),
        level_count_(spec.level_count()),
        lag_(spec.completion_lag()) {
    cumulative_p_.resize(level_count_);
    double acc = 0.0;
    for (std::size_t i = 0; i < level_count_; ++i) {
      acc += policy.probabilities[i];
      cumulative_p_[i] = acc;
    }
    budget_.resize(level_count_);
    for (std::size_t i = 0; i < level_count_; ++i) {
      budget_[i] = rng_.next_exponential(spec.level(i).failure_rate);
    }
    result_.failures.assign(level_count_, 0);
    // the run begins from a durable state: a free top-level checkpoint at t=0
    live_.push_back({0.0, static_cast<int>(level_count_), 0, 0.0, 0.0});
    if (log_) log_->append(0.0, "checkpoint_complete", static_cast<int>(level_count_), 0);
  }

  ReplicaResult run() {
    while (time_ < duration_) {
      const int level = sample_level();
      ++period_;
      if (log_) log_->append(time_, "period_start", level, period_);
      const double work = policy_.interval - spec_.level(level - 1).checkpoint_cost;
      const int failed = advance(policy_.interval, work, all_levels_mask(), &buckets_.checkpointing);
      if (time_ >= duration_) break;
      if (failed == 0) {
        commit_checkpoint(level);
      } else {
        handle_failure(failed);
      }
    }
    if (log_) log_->append(duration_, "run_end", 0, period_);
    result_.buckets = buckets_;
    result_.utilization = buckets_.useful / duration_;
    return result_;
  }

 private:
  std::uint32_t all_levels_mask() const { return (1u << level_count_) - 1u; }

  int sample_level() {
    if (!config_.level_sequence.empty()) {
      const int forced = config_.level_sequence[sequence_pos_ % config_.level_sequence.size()];
      ++sequence_pos_;
      return forced;
    }
    return static_cast<int>(rng_.next_index(cumulative_p_)) + 1;
  }

  // Advance through an activity of length `span`; the first `useful_prefix`
  // seconds count as useful work, the remainder goes to *overhead. Only
  // levels in `mask` tick (paused clocks keep their remaining budget).
  // Returns the 1-based failing level, or 0 if the activity completed or the
  // horizon was reached.
  int advance(double span, double useful_prefix, std::uint32_t mask, double* overhead) {
    double done = 0.0;
    while (true) {
      double tau = kInf;
      std::size_t fail_idx = level_count_;
      for (std::size_t i = 0; i < level_count_; ++i) {
        if ((mask >> i) & 1u) {
          if (budget_[i] < tau) {
            tau = budget_[i];
            fail_idx = i;
          }
        }
      }
      const double step = std::min({tau, span - done, duration_ - time_});
      const double useful_add = std::clamp(useful_prefix - done, 0.0, step);
      buckets_.useful += useful_add;
      *overhead += step - useful_add;
      for (std::size_t i = 0; i < level_count_; ++i) {
        if ((mask >> i) & 1u) budget_[i] -= step;
      }
      time_ += step;
      done += step;
      promote_completed();
      if (time_ >= duration_) return 0;
      if (step == tau && done < span) {
        budget_[fail_idx] = rng_.next_exponential(spec_.level(fail_idx).failure_rate);
        ++result_.failures[fail_idx];
        if (log_) log_->append(time_, "failure", static_cast<int>(fail_idx) + 1, period_);
        return static_cast<int>(fail_idx) + 1;
      }
      if (done >= span) return 0;
    }
  }

  void promote_completed() {
    while (!inflight_.empty() && inflight_.front().complete_time <= time_) {
      live_.push_back(inflight_.front());
      ++result_.checkpoints_completed;
      if (log_) {
        log_->append(inflight_.front().complete_time, "checkpoint_complete",
                     inflight_.front().level, inflight_.front().period);
      }
      inflight_.pop_front();
    }
  }

  void commit_checkpoint(int level) {
    CompletedCheckpoint entry{time_ + lag_, level, period_, buckets_.useful,
                              buckets_.checkpointing};
    if (lag_ <= 0.0) {
      live_.push_back(entry);
      ++result_.checkpoints_completed;
      if (log_) log_->append(time_, "checkpoint_complete", level, period_);
    } else {
      inflight_.push_back(entry);
    }
  }

  void discard_inflight() {
    for (const CompletedCheckpoint& c : inflight_) {
      ++result_.checkpoints_discarded;
      if (log_) log_->append(time_, "checkpoint_discard", c.level, c.period);
    }
    inflight_.clear();
  }

  void handle_failure(int failure_level) {
    while (true) {
      discard_inflight();
      // latest fully completed checkpoint of a sufficient level; the t=0
      // virtual checkpoint guarantees one exists
      std::size_t pick = live_.size();
      for (std::size_t i = live_.size(); i-- > 0;) {
        if (live_[i].level >= failure_level) {
          pick = i;
          break;
        }
      }
      const CompletedCheckpoint target = live_[pick];
      // later completed checkpoints are of insufficient level; they roll back too
      while (live_.size() > pick + 1) {
        ++result_.checkpoints_discarded;
        if (log_) log_->append(time_, "checkpoint_discard", live_.back().level, live_.back().period);
        live_.pop_back();
      }
      buckets_.lost += (buckets_.useful - target.useful_snapshot) +
                       (buckets_.checkpointing - target.checkpointing_snapshot);
      buckets_.useful = target.useful_snapshot;
      buckets_.checkpointing = target.checkpointing_snapshot;
      if (log_) log_->append(time_, "rollback", target.level, target.period);

      const std::uint32_t mask = config_.restart_failure_scope == RestartFailureScope::all_levels
                                     ? all_levels_mask()
                                     : (1u << target.level) - 1u;
      ++result_.restart_attempts;
      if (log_) log_->append(time_, "restart_start", target.level, target.period);
      const int failed =
          advance(spec_.level(target.level - 1).restart_cost, 0.0, mask, &buckets_.restarting);
      if (time_ >= duration_) return;
      if (failed == 0) {
        if (log_) log_->append(time_, "restart_complete", target.level, target.period);
        return;
      }
      failure_level = failed;  // may need a deeper checkpoint under all_levels
    }
  }

  const SystemSpec& spec_;
  const Policy& policy_;
  const SimulationConfig& config_;
  double duration_;
  Philox4x64 rng_;
  EventLog* log_;
  std::size_t level_count_;
  double lag_;

  std::vector<double> cumulative_p_;
  std::vector<double> budget_;  // per-level remaining exposure to the next failure
  std::vector<CompletedCheckpoint> live_;
  std::deque<CompletedCheckpoint> inflight_;
  TimeBuckets buckets_;
  ReplicaResult result_;
  double time_ = 0.0;
  long period_ = 0;
  std::size_t sequence_pos_ = 0;
};

double resolve_duration(const SystemSpec& spec, const SimulationConfig& config) {
  if (config.duration > 0.0) return config.duration;
  const double lowest_rate = spec.level(spec.level_count() - 1).failure_rate;
  if (lowest_rate <= 0.0) {
    fail(errc::invalid_argument,
         "simulate: duration must be given when the top level never fails "
         "(no 1000/lambda_L default)");
  }
  return 1000.0 / lowest_rate;
}

void validate_config(const SystemSpec& spec, const Policy& policy,
                     const SimulationConfig& config, double duration) {
  validate_policy(spec, policy);
  if (config.replicas < 1) fail(errc::invalid_argument, "simulate: replicas must be >= 1");
  if (!(duration > 10.0 * policy.interval)) {
    fail(errc::invalid_argument, "simulate: duration must exceed 10 checkpoint intervals");
  }
  if (spec.level_count() > 31) fail(errc::invalid_argument, "simulate: more than 31 levels");
  for (int lev : config.level_sequence) {
    if (lev < 1 || static_cast<std::size_t>(lev) > spec.level_count()) {
      fail(errc::invalid_argument, "simulate: level_sequence entry out of range");
    }
  }
  for (std::size_t i = 0; i < spec.level_count(); ++i) {
    const bool used = !config.level_sequence.empty() || policy.probabilities[i] > 0.0;
    if (used && spec.level(i).checkpoint_cost > policy.interval) {
      fail(errc::infeasible_policy,
           "simulate: checkpoint cost of level " + std::to_string(i + 1) +
               " does not fit into the interval");
    }
  }
}

SimulationReport run_replicas(const SystemSpec& spec, const Policy& policy,
                              const SimulationConfig& config, double duration,
                              std::uint64_t stream_salt) {
  const int replicas = config.replicas;
  std::vector<ReplicaResult> results(replicas);
  std::vector<EventLog> logs(config.event_log_path.empty() ? 0 : replicas);

  const auto run_one = [&](int r) {
    EventLog* log = nullptr;
    if (!logs.empty()) {
      logs[r].enable();
      log = &logs[r];
    }
    Philox4x64 rng(config.seed, mix64(stream_salt ^ mix64(static_cast<std::uint64_t>(r) + 1)));
    Replica replica(spec, policy, config, duration, std::move(rng), log);
    results[r] = replica.run();
  };

  int threads = config.max_threads > 0 ? config.max_threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, replicas));
  if (threads == 1) {
    for (int r = 0; r < replicas; ++r) run_one(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) run_one(r);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  SimulationReport report;
  report.duration = duration;
  report.per_replica_utilization.reserve(replicas);
  report.per_replica_buckets.reserve(replicas);
  report.event_counts.failures.assign(spec.level_count(), 0);
  double sum = 0.0;
  for (const ReplicaResult& r : results) {
    report.per_replica_utilization.push_back(r.utilization);
    report.per_replica_buckets.push_back(r.buckets);
    for (std::size_t i = 0; i < spec.level_count(); ++i) {
      report.event_counts.failures[i] += r.failures[i];
    }
    report.event_counts.checkpoints_completed += r.checkpoints_completed;
    report.event_counts.checkpoints_discarded += r.checkpoints_discarded;
    report.event_counts.restart_attempts += r.restart_attempts;
    sum += r.utilization;
  }
  report.mean = sum / replicas;
  double ss = 0.0;
  for (double u : report.per_replica_utilization) ss += (u - report.mean) * (u - report.mean);
  report.std_dev = replicas > 1 ? std::sqrt(ss / (replicas - 1)) : 0.0;

  if (!logs.empty()) {
    std::ofstream out(config.event_log_path);
    if (!out) fail(errc::io_error, "simulate: cannot open event log " + config.event_log_path);
    char line[160];
    for (int r = 0; r < replicas; ++r) {
      std::snprintf(line, sizeof line,
                    R"({"t":0,"kind":"replica_start","level":0,"period":%d})", r);
      out << line << '\n';
      for (const EventRecord& e : logs[r].records()) {
        std::snprintf(line, sizeof line, R"({"t":%.17g,"kind":"%s","level":%d,"period":%ld})",
                      e.t, e.kind, e.level, e.period);
        out << line << '\n';
      }
    }
    if (!out.good()) fail(errc::io_error, "simulate: event log write failed");
  }
  return report;
}

}  // namespace

SimulationReport simulate(const SystemSpec& spec, const Policy& policy,
                          const SimulationConfig& config) {
  const double duration = resolve_duration(spec, config);
  validate_config(spec, policy, config, duration);
  return run_replicas(spec, policy, config, duration, 0);
}

std::vector<SimulationReport> simulate_sweep(const SystemSpec& spec, const Policy& policy,
                                             const SimulationConfig& config, SweepAxis axis,
                                             int level, std::span<const double> values) {
  if (axis == SweepAxis::probability || axis == SweepAxis::failure_rate) {
    if (level < 1 || static_cast<std::size_t>(level) > spec.level_count()) {
      fail(errc::invalid_argument, "simulate_sweep: level out of range");
    }
  }
  std::vector<SimulationReport> reports;
  reports.reserve(values.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    const double value = values[vi];
    std::vector<LevelSpec> levels(spec.levels().begin(), spec.levels().end());
    std::optional<TopologySpec> topology = spec.topology();
    Policy swept = policy;
    switch (axis) {
      case SweepAxis::interval:
        swept.interval = value;
        break;
      case SweepAxis::probability: {
        if (!(value >= 0.0 && value <= 1.0)) {
          fail(errc::invalid_argument, "simulate_sweep: probability value outside [0, 1]");
        }
        double others = 0.0;
        for (std::size_t i = 0; i < swept.probabilities.size(); ++i) {
          if (i != static_cast<std::size_t>(level - 1)) others += swept.probabilities[i];
        }
        if (others <= 0.0 && value < 1.0) {
          fail(errc::invalid_argument,
               "simulate_sweep: cannot rescale, remaining probabilities are all zero");
        }
        for (std::size_t i = 0; i < swept.probabilities.size(); ++i) {
          if (i == static_cast<std::size_t>(level - 1)) {
            swept.probabilities[i] = value;
          } else {
            swept.probabilities[i] *= others > 0.0 ? (1.0 - value) / others : 0.0;
          }
        }
        break;
      }
      case SweepAxis::operators: {
        if (!topology) {
          fail(errc::invalid_argument, "simulate_sweep: operator sweep requires a topology");
        }
        topology->critical_path_operators = static_cast<int>(value);
        break;
      }
      case SweepAxis::failure_rate:
        levels[level - 1].failure_rate = value;
        break;
    }
    // swept variants may step outside the level orderings on purpose
    const SystemSpec swept_spec(std::move(levels), topology, /*allow_unordered_levels=*/true);
    const double duration = resolve_duration(swept_spec, config);
    validate_config(swept_spec, swept, config, duration);
    std::uint64_t value_bits;
    static_assert(sizeof value_bits == sizeof value);
    std::memcpy(&value_bits, &value, sizeof value_bits);
    const std::uint64_t salt =
        mix64(static_cast<std::uint64_t>(axis) * 4 + 1) ^ mix64(value_bits) ^
        mix64(static_cast<std::uint64_t>(level) << 8);
    reports.push_back(run_replicas(swept_spec, swept, config, duration, salt));
  }
  return reports;
}

}  // namespace mlckpt
