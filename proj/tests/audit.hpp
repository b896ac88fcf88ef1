#pragma once

// Independent replay of a simulator event log. Rebuilds the wall-clock
// attribution from the logged events alone (plus the spec/policy constants)
// and re-checks the recovery rule at every failure: the chosen checkpoint is
// the latest fully completed one of sufficient level, and nothing sufficient
// was skipped over.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <stdexcept>

#include "json.hpp"
#include "mlckpt/simulator.hpp"
#include "mlckpt/types.hpp"

#define MLCKPT_AUDIT_CHECK(cond)                                                   \
  do {                                                                             \
    if (!(cond)) {                                                                 \
      throw std::runtime_error(std::string("audit violation at line ") +           \
                               std::to_string(__LINE__) + ": " #cond);             \
    }                                                                              \
  } while (0)

namespace mlckpt::testing {

struct AuditOutcome {
  std::vector<TimeBuckets> per_replica;
  long recovery_checks = 0;
  long events = 0;
};

namespace audit_detail {

struct Record {
  double t = 0.0;
  std::string kind;
  int level = 0;
  long period = 0;
};

struct Snapshot {
  double useful = 0.0;
  double checkpointing = 0.0;
};

struct Completed {
  double complete_time = 0.0;
  int level = 0;
  long period = 0;
  Snapshot snapshot;
};

class ReplicaAuditor {
 public:
  ReplicaAuditor(const SystemSpec& spec, const Policy& policy, double duration)
      : spec_(spec), policy_(policy), duration_(duration), lag_(spec.completion_lag()) {
    live_.push_back({0.0, static_cast<int>(spec.level_count()), 0, {0.0, 0.0}});
  }

  void feed(const Record& r, long* recovery_checks) {
    if (r.kind == "checkpoint_complete") {
      if (r.period == 0) return;  // the free initial checkpoint
      const auto it = pending_.find(r.period);
      MLCKPT_AUDIT_CHECK(it != pending_.end());
      MLCKPT_AUDIT_CHECK(std::abs(it->second.complete_time - r.t) <= 1e-9);
      MLCKPT_AUDIT_CHECK(it->second.level == r.level);
      live_.push_back(it->second);
      pending_.erase(it);
      return;
    }
    if (r.kind == "period_start") {
      close_open_activity(r.t, /*failed=*/false);
      open_ = Open{r.t, r.level, r.period, Open::Kind::period};
      return;
    }
    if (r.kind == "failure") {
      close_open_activity(r.t, /*failed=*/true);
      MLCKPT_AUDIT_CHECK(!failure_.has_value());
      failure_ = r;
      return;
    }
    if (r.kind == "checkpoint_discard") {
      // in-flight discards drop silently; completed ones must be part of the
      // in-progress rollback and are checked there
      const auto it = pending_.find(r.period);
      if (it != pending_.end()) {
        pending_.erase(it);
        return;
      }
      MLCKPT_AUDIT_CHECK(failure_.has_value());
      bool found = false;
      for (std::size_t i = 0; i < live_.size(); ++i) {
        if (live_[i].period == r.period) {
          // losing a completed checkpoint is only legal if it cannot serve
          // the pending failure
          MLCKPT_AUDIT_CHECK(live_[i].level < failure_->level);
          live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(i));
          found = true;
          break;
        }
      }
      MLCKPT_AUDIT_CHECK(found);
      return;
    }
    if (r.kind == "rollback") {
      MLCKPT_AUDIT_CHECK(failure_.has_value());
      MLCKPT_AUDIT_CHECK(pending_.empty());
      ++*recovery_checks;
      // the recovery checkpoint must be sufficient and the latest such
      MLCKPT_AUDIT_CHECK(r.level >= failure_->level);
      const Completed* target = nullptr;
      for (const Completed& c : live_) {
        if (c.period == r.period) target = &c;
      }
      MLCKPT_AUDIT_CHECK(target != nullptr);
      MLCKPT_AUDIT_CHECK(target->level == r.level);
      MLCKPT_AUDIT_CHECK(target->complete_time <= failure_->t);
      for (const Completed& c : live_) {
        if (c.level >= failure_->level && c.complete_time <= failure_->t) {
          MLCKPT_AUDIT_CHECK(c.complete_time <= target->complete_time);
        }
      }
      // roll the counters back and drop everything after the target
      lost_ += (useful_ - target->snapshot.useful) +
               (checkpointing_ - target->snapshot.checkpointing);
      useful_ = target->snapshot.useful;
      checkpointing_ = target->snapshot.checkpointing;
      const double cut = target->complete_time;
      std::vector<Completed> keep;
      for (const Completed& c : live_) {
        if (c.complete_time <= cut) keep.push_back(c);
      }
      live_ = std::move(keep);
      failure_.reset();
      return;
    }
    if (r.kind == "restart_start") {
      open_ = Open{r.t, r.level, r.period, Open::Kind::restart};
      return;
    }
    if (r.kind == "restart_complete") {
      MLCKPT_AUDIT_CHECK(open_.has_value());
      MLCKPT_AUDIT_CHECK(open_->kind == Open::Kind::restart);
      const double expected = spec_.level(static_cast<std::size_t>(open_->level) - 1).restart_cost;
      MLCKPT_AUDIT_CHECK(std::abs((r.t - open_->start) - expected) <= 1e-9);
      close_open_activity(r.t, /*failed=*/false);
      return;
    }
    if (r.kind == "run_end") {
      close_open_activity(std::min(r.t, duration_), /*failed=*/false);
      finished_ = true;
      return;
    }
    throw std::runtime_error("audit: unknown event kind " + r.kind);
  }

  TimeBuckets buckets() const {
    MLCKPT_AUDIT_CHECK(finished_);
    return {useful_, checkpointing_, lost_, restarting_};
  }

 private:
  struct Open {
    double start = 0.0;
    int level = 0;
    long period = 0;
    enum class Kind { period, restart } kind = Kind::period;
  };

  void close_open_activity(double until, bool failed) {
    if (!open_.has_value()) return;
    const double end = std::min(until, duration_);
    if (open_->kind == Open::Kind::restart) {
      restarting_ += std::max(0.0, end - open_->start);
      open_.reset();
      return;
    }
    const double interval = policy_.interval;
    const double cost = spec_.level(static_cast<std::size_t>(open_->level) - 1).checkpoint_cost;
    const double span = std::min(end - open_->start, interval);
    MLCKPT_AUDIT_CHECK(span >= -1e-12);
    const double work = std::min(span, interval - cost);
    useful_ += std::max(0.0, work);
    checkpointing_ += std::max(0.0, span - work);
    if (!failed && end - open_->start >= interval - 1e-9 && end <= duration_) {
      // the period completed: its checkpoint captures the state now and is
      // fully complete after the topology lag
      pending_[open_->period] = Completed{open_->start + interval + lag_, open_->level,
                                          open_->period, Snapshot{useful_, checkpointing_}};
      if (lag_ <= 0.0) {
        live_.push_back(pending_[open_->period]);
        pending_.erase(open_->period);
      }
    }
    open_.reset();
  }

  const SystemSpec& spec_;
  const Policy& policy_;
  double duration_;
  double lag_;
  std::vector<Completed> live_;
  std::map<long, Completed> pending_;
  std::optional<Record> failure_;
  std::optional<Open> open_;
  double useful_ = 0.0;
  double checkpointing_ = 0.0;
  double lost_ = 0.0;
  double restarting_ = 0.0;
  bool finished_ = false;
};

}  // namespace audit_detail

inline AuditOutcome audit_event_log(const std::string& path, const SystemSpec& spec,
                                    const Policy& policy, double duration) {
  std::ifstream in(path);
  MLCKPT_AUDIT_CHECK(in.good());
  AuditOutcome outcome;
  std::optional<audit_detail::ReplicaAuditor> auditor;
  std::string line;
  double previous_t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    audit_detail::Record r{j.at("t").get<double>(), j.at("kind").get<std::string>(),
                           j.at("level").get<int>(), j.at("period").get<long>()};
    ++outcome.events;
    if (r.kind == "replica_start") {
      if (auditor.has_value()) outcome.per_replica.push_back(auditor->buckets());
      auditor.emplace(spec, policy, duration);
      previous_t = 0.0;
      continue;
    }
    MLCKPT_AUDIT_CHECK(auditor.has_value());
    MLCKPT_AUDIT_CHECK(r.t >= previous_t - 1e-9);  // the log is time-ordered per replica
    previous_t = std::max(previous_t, r.t);
    auditor->feed(r, &outcome.recovery_checks);
  }
  if (auditor.has_value()) outcome.per_replica.push_back(auditor->buckets());
  return outcome;
}

}  // namespace mlckpt::testing
