#include "mlckpt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlckpt/model.hpp"
#include "mlckpt/numerics.hpp"
#include "mlckpt/philox.hpp"

namespace mlckpt {

namespace {

struct Bounds {
  double lo;
  double hi;
};

Bounds resolve_bounds(const SystemSpec& spec, const OptimizerConfig& config) {
  Bounds b;
  b.lo = config.interval_lo > 0.0 ? config.interval_lo : spec.max_checkpoint_cost() + 1.0;
  if (config.interval_hi > 0.0) {
    b.hi = config.interval_hi;
  } else {
    const double rate = spec.level(0).failure_rate;
    b.hi = rate > 0.0 ? std::min(10.0 / rate, 1e6) : 1e6;
  }
  if (!(b.lo < b.hi)) {
    fail(errc::invalid_argument, "optimize: infeasible interval bounds [" +
                                     std::to_string(b.lo) + ", " + std::to_string(b.hi) + "]");
  }
  return b;
}

OptimizerConfig resolve_config(const OptimizerConfig& config) {
  OptimizerConfig c = config;
  if (c.multistarts < 1) c.multistarts = 8;
  if (!(c.simplex_tolerance > 0.0)) c.simplex_tolerance = 1e-12;
  if (!(c.interval_tolerance > 0.0)) c.interval_tolerance = 0.01;
  return c;
}

// Maximization problem over (T, p restricted to `free_levels`); pinned levels
// keep probability zero. Infeasible or diverging policies score a graded
// penalty that slopes back toward the bracket center, so Nelder-Mead is never
// stranded on a flat -inf region.
class Problem {
 public:
  Problem(const SystemSpec& spec, Bounds bounds, std::vector<std::size_t> free_levels,
          bool optimize_interval, double fixed_interval = 0.0)
      : spec_(spec),
        bounds_(bounds),
        free_(std::move(free_levels)),
        optimize_interval_(optimize_interval),
        fixed_interval_(fixed_interval),
        center_(std::sqrt(bounds.lo * bounds.hi)) {}

  std::size_t dimension() const {
    return (optimize_interval_ ? 1 : 0) + (free_.size() > 1 ? free_.size() - 1 : 0);
  }

  // x = [log T][theta_2..theta_k]; theta_1 is gauge-fixed to 0.
  std::pair<double, std::vector<double>> decode(std::span<const double> x) const {
    const double interval = optimize_interval_ ? std::exp(x[0]) : fixed_interval_;
    std::vector<double> p(spec_.level_count(), 0.0);
    if (free_.size() == 1) {
      p[free_[0]] = 1.0;
    } else {
      const std::size_t off = optimize_interval_ ? 1 : 0;
      double max_theta = 0.0;
      for (std::size_t i = 0; i + 1 < free_.size(); ++i) max_theta = std::max(max_theta, x[off + i]);
      double sum = std::exp(0.0 - max_theta);
      p[free_[0]] = sum;
      for (std::size_t i = 0; i + 1 < free_.size(); ++i) {
        const double e = std::exp(x[off + i] - max_theta);
        p[free_[i + 1]] = e;
        sum += e;
      }
      for (std::size_t i : free_) p[i] /= sum;
    }
    return {interval, std::move(p)};
  }

  double score(double interval, const std::vector<double>& p) const {
    ++evaluations_;
    if (!(interval >= bounds_.lo && interval <= bounds_.hi)) return penalty(interval);
    try {
      return evaluate(spec_, Policy{interval, p}).utilization;
    } catch (const error&) {
      return penalty(interval);
    }
  }

  double score_encoded(std::span<const double> x) const {
    const auto [interval, p] = decode(x);
    return score(interval, p);
  }

  long evaluations() const { return evaluations_; }
  const SystemSpec& spec() const { return spec_; }
  const Bounds& bounds() const { return bounds_; }
  const std::vector<std::size_t>& free_levels() const { return free_; }
  bool optimizes_interval() const { return optimize_interval_; }

 private:
  double penalty(double interval) const {
    const double off = interval > 0.0 ? std::abs(std::log(interval / center_)) : 1e3;
    return -1e90 * (1.0 + off);
  }

  const SystemSpec& spec_;
  Bounds bounds_;
  std::vector<std::size_t> free_;
  bool optimize_interval_;
  double fixed_interval_;
  double center_;
  mutable long evaluations_ = 0;
};

// Standard Nelder-Mead (reflect 1, expand 2, contract 0.5, shrink 0.5) on the
// encoded coordinates; returns the best vertex.
std::vector<double> nelder_mead(const Problem& problem, std::vector<double> x0, double spread_tol) {
  const std::size_t d = x0.size();
  if (d == 0) return x0;
  struct Vertex {
    std::vector<double> x;
    double f;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(d + 1);
  simplex.push_back({x0, problem.score_encoded(x0)});
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> x = x0;
    x[i] += i == 0 && problem.optimizes_interval() ? 0.3 : 0.7;
    simplex.push_back({x, problem.score_encoded(x)});
  }
  const auto by_f = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
  const long max_iter = 600 * static_cast<long>(d);
  for (long it = 0; it < max_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_f);
    if (std::abs(simplex.front().f - simplex.back().f) <=
        spread_tol * (1.0 + std::abs(simplex.front().f))) {
      break;
    }
    std::vector<double> centroid(d, 0.0);
    for (std::size_t v = 0; v < d; ++v) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v].x[i];
    }
    for (double& c : centroid) c /= static_cast<double>(d);
    Vertex& worst = simplex.back();
    const auto blend = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = centroid[i] + t * (centroid[i] - worst.x[i]);
      return x;
    };
    std::vector<double> xr = blend(1.0);
    const double fr = problem.score_encoded(xr);
    if (fr > simplex.front().f) {
      std::vector<double> xe = blend(2.0);
      const double fe = problem.score_encoded(xe);
      if (fe > fr) {
        worst = {std::move(xe), fe};
      } else {
        worst = {std::move(xr), fr};
      }
      continue;
    }
    if (fr > simplex[d - 1].f) {
      worst = {std::move(xr), fr};
      continue;
    }
    std::vector<double> xc = blend(fr > worst.f ? 0.5 : -0.5);
    const double fc = problem.score_encoded(xc);
    if (fc > std::max(fr, worst.f)) {
      worst = {std::move(xc), fc};
      continue;
    }
    for (std::size_t v = 1; v <= d; ++v) {
      for (std::size_t i = 0; i < d; ++i) {
        simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
      }
      simplex[v].f = problem.score_encoded(simplex[v].x);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_f);
  return simplex.front().x;
}

struct Candidate {
  double interval = 0.0;
  std::vector<double> probabilities;
  double utilization = -std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Cyclic coordinate refinement: golden-section on T, then exchange searches
// along every free simplex edge, until a full cycle moves U by < 1e-9 and T
// by < interval_tolerance.
Candidate refine(const Problem& problem, double interval, std::vector<double> p,
                 const OptimizerConfig& config, bool refine_interval) {
  const Bounds& bounds = problem.bounds();
  const auto& free = problem.free_levels();
  double best = problem.score(interval, p);
  bool converged = false;
  for (int cycle = 0; cycle < 60; ++cycle) {
    const double prev_best = best;
    const double prev_interval = interval;
    if (refine_interval) {
      const double lo = std::max(bounds.lo, interval * 0.6);
      const double hi = std::min(bounds.hi, interval * 1.6);
      if (lo < hi) {
        const auto line = maximize_1d([&](double t) { return problem.score(t, p); }, lo, hi,
                                      config.interval_tolerance * 0.01);
        if (line.max > best) {
          best = line.max;
          interval = line.argmax;
        }
      }
    }
    for (std::size_t a = 0; a + 1 < free.size(); ++a) {
      for (std::size_t b = a + 1; b < free.size(); ++b) {
        const std::size_t i = free[a];
        const std::size_t j = free[b];
        const double lo = -p[i];
        const double hi = p[j];
        if (!(hi - lo > 1e-12)) continue;
        const auto line = maximize_1d(
            [&](double s) {
              std::vector<double> q = p;
              q[i] += s;
              q[j] -= s;
              return problem.score(interval, q);
            },
            lo, hi, 1e-7);
        if (line.max > best) {
          best = line.max;
          p[i] += line.argmax;
          p[j] -= line.argmax;
          p[i] = std::max(p[i], 0.0);
          p[j] = std::max(p[j], 0.0);
          double sum = 0.0;
          for (std::size_t f : free) sum += p[f];
          for (std::size_t f : free) p[f] /= sum;
        }
      }
    }
    if (std::abs(best - prev_best) < 1e-9 &&
        std::abs(interval - prev_interval) < config.interval_tolerance) {
      converged = true;
      break;
    }
  }
  return {interval, std::move(p), best, converged};
}

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.utilization != b.utilization) return a.utilization > b.utilization;
  if (a.interval != b.interval) return a.interval < b.interval;
  return a.probabilities < b.probabilities;
}

double plateau_width(const Problem& problem, const Candidate& best) {
  const double floor = best.utilization - 1e-4;
  const Bounds& bounds = problem.bounds();
  const auto above = [&](double t) { return problem.score(t, best.probabilities) >= floor; };
  const auto edge = [&](bool upward) {
    double inside = best.interval;
    double step = std::max(best.interval * 1e-4, 1e-6);
    double outside = 0.0;
    bool found_outside = false;
    for (int i = 0; i < 200; ++i) {
      double t = upward ? inside + step : inside - step;
      t = upward ? std::min(t, bounds.hi) : std::max(t, bounds.lo);
      if (above(t)) {
        inside = t;
        if ((upward && t >= bounds.hi) || (!upward && t <= bounds.lo)) return t;
        step *= 2.0;
      } else {
        outside = t;
        found_outside = true;
        break;
      }
    }
    if (!found_outside) return inside;
    for (int i = 0; i < 60 && std::abs(outside - inside) > 1e-6; ++i) {
      const double mid = 0.5 * (inside + outside);
      (above(mid) ? inside : outside) = mid;
    }
    return inside;
  };
  return edge(true) - edge(false);
}

OptimizationResult run_multistart(const Problem& problem, const OptimizerConfig& config,
                                  bool refine_interval) {
  const Bounds& bounds = problem.bounds();
  const auto& free = problem.free_levels();
  const double log_lo = std::log(bounds.lo);
  const double log_hi = std::log(bounds.hi);
  Candidate best;
  for (int s = 0; s < config.multistarts; ++s) {
    Philox4x64 rng(config.seed, mix64(0x6f70741eULL ^ static_cast<std::uint64_t>(s)));
    // Latin-hypercube stratum on log T; Dirichlet(1) start on the simplex
    double log_t;
    if (s == 0) {
      log_t = 0.5 * (log_lo + log_hi);
    } else {
      const double u = (s - 1 + rng.next_unit()) / std::max(1, config.multistarts - 1);
      log_t = log_lo + u * (log_hi - log_lo);
    }
    std::vector<double> start_p(problem.spec().level_count(), 0.0);
    if (s == 0) {
      for (std::size_t f : free) start_p[f] = 1.0 / static_cast<double>(free.size());
    } else {
      double sum = 0.0;
      for (std::size_t f : free) {
        start_p[f] = rng.next_exponential(1.0);
        sum += start_p[f];
      }
      for (std::size_t f : free) start_p[f] /= sum;
    }

    std::vector<double> x;
    if (problem.optimizes_interval()) x.push_back(log_t);
    for (std::size_t i = 1; i < free.size(); ++i) {
      x.push_back(std::log(std::max(start_p[free[i]], 1e-9) / std::max(start_p[free[0]], 1e-9)));
    }
    const std::vector<double> polished = nelder_mead(problem, std::move(x), config.simplex_tolerance);
    auto [interval, p] = problem.decode(polished);
    Candidate cand = refine(problem, interval, std::move(p), config, refine_interval);
    if (candidate_less(cand, best)) best = cand;
  }
  if (best.utilization <= -1e80) {
    fail(errc::policy_diverges,
         "optimize: every start diverged or was infeasible within the interval bounds");
  }
  OptimizationResult result;
  result.best_policy = Policy{best.interval, best.probabilities};
  result.best_utilization = best.utilization;
  result.restarts_used = config.multistarts;
  result.converged = best.converged;
  if (refine_interval) result.plateau_width = plateau_width(problem, best);
  result.evaluations = problem.evaluations();
  return result;
}

std::vector<std::size_t> all_levels(const SystemSpec& spec) {
  std::vector<std::size_t> free(spec.level_count());
  std::iota(free.begin(), free.end(), 0);
  return free;
}

}  // namespace

OptimizationResult optimize(const SystemSpec& spec, const OptimizerConfig& config_in) {
  const OptimizerConfig config = resolve_config(config_in);
  const Problem problem(spec, resolve_bounds(spec, config), all_levels(spec), true);
  return run_multistart(problem, config, true);
}

OptimizationResult optimize_fixed_interval(const SystemSpec& spec, double interval,
                                           const OptimizerConfig& config_in) {
  const OptimizerConfig config = resolve_config(config_in);
  Bounds bounds = resolve_bounds(spec, config);
  bounds.lo = std::min(bounds.lo, interval);
  bounds.hi = std::max(bounds.hi, interval);
  const Problem problem(spec, bounds, all_levels(spec), false, interval);
  OptimizationResult result = run_multistart(problem, config, false);
  result.best_policy.interval = interval;
  return result;
}

OptimizationResult optimize_fixed_probabilities(const SystemSpec& spec,
                                                std::span<const double> probabilities,
                                                const OptimizerConfig& config_in) {
  if (probabilities.size() != spec.level_count()) {
    fail(errc::invalid_argument, "optimize_fixed_probabilities: probability count mismatch");
  }
  const OptimizerConfig config = resolve_config(config_in);
  const Problem problem(spec, resolve_bounds(spec, config), all_levels(spec), true);
  const std::vector<double> p(probabilities.begin(), probabilities.end());
  const auto line = maximize_1d([&](double t) { return problem.score(t, p); },
                                problem.bounds().lo, problem.bounds().hi,
                                config.interval_tolerance * 0.01);
  if (line.max <= -1e80) {
    fail(errc::policy_diverges,
         "optimize_fixed_probabilities: no feasible interval within the bounds");
  }
  OptimizationResult result;
  result.best_policy = Policy{line.argmax, p};
  result.best_utilization = line.max;
  result.evaluations = problem.evaluations();
  result.restarts_used = 1;
  result.converged = true;
  result.plateau_width = plateau_width(problem, Candidate{line.argmax, p, line.max, true});
  return result;
}

namespace {

LevelComparisonRow optimize_with_tiers(const SystemSpec& spec, const OptimizerConfig& config,
                                       std::size_t k) {
  // checkpoint levels available with k tiers: the k-1 cheapest plus the top
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i + 1 < k; ++i) free.push_back(i);
  free.push_back(spec.level_count() - 1);
  const Problem problem(spec, resolve_bounds(spec, config), free, true);
  const OptimizationResult best = run_multistart(problem, config, true);
  LevelComparisonRow row;
  row.levels_used = static_cast<int>(k);
  row.policy = best.best_policy;
  row.utilization = best.best_utilization;
  return row;
}

}  // namespace

std::vector<LevelComparisonRow> compare_levels(const SystemSpec& spec,
                                               const OptimizerConfig& config_in) {
  if (spec.level_count() < 2) {
    fail(errc::invalid_argument, "compare_levels: needs at least two levels");
  }
  const OptimizerConfig config = resolve_config(config_in);
  std::vector<LevelComparisonRow> rows;
  rows.reserve(spec.level_count());
  for (std::size_t k = 1; k <= spec.level_count(); ++k) {
    rows.push_back(optimize_with_tiers(spec, config, k));
  }
  for (LevelComparisonRow& row : rows) {
    row.pct_increase = 100.0 * (row.utilization - rows[0].utilization) / rows[0].utilization;
  }
  return rows;
}

LevelComparisonRow compare_levels_row(const SystemSpec& spec, const OptimizerConfig& config_in,
                                      int levels_used) {
  if (levels_used < 1 || static_cast<std::size_t>(levels_used) > spec.level_count()) {
    fail(errc::invalid_argument, "compare_levels_row: levels_used out of range");
  }
  const OptimizerConfig config = resolve_config(config_in);
  LevelComparisonRow row = optimize_with_tiers(spec, config, static_cast<std::size_t>(levels_used));
  const double baseline =
      levels_used == 1 ? row.utilization : optimize_with_tiers(spec, config, 1).utilization;
  row.pct_increase = 100.0 * (row.utilization - baseline) / baseline;
  return row;
}

}  // namespace mlckpt
