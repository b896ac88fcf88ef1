#pragma once

#include <cmath>
#include <vector>

#include "mlckpt/philox.hpp"
#include "mlckpt/types.hpp"

namespace mlckpt::testing {

inline constexpr double kDay = seconds_per_day;

inline double per_day(double rate) { return rate / kDay; }

// Random feasible (spec, policy) pairs for the property batteries. Rates span
// about two orders of magnitude, T Lambda stays below ~0.5, and tail
// probabilities are kept off the divergence boundary.
struct RandomScenario {
  std::vector<LevelSpec> levels;
  std::optional<TopologySpec> topology;
  Policy policy;

  SystemSpec spec() const { return SystemSpec(levels, topology); }
};

inline RandomScenario random_scenario(Philox4x64& rng, std::size_t level_count,
                                      bool with_topology) {
  RandomScenario s;
  double rate = per_day(std::pow(10.0, 1.0 + 1.2 * rng.next_unit()));  // 10..160 per day
  double cost = 2.0 + 10.0 * rng.next_unit();
  double restart = cost * (0.5 + rng.next_unit());
  for (std::size_t l = 0; l < level_count; ++l) {
    s.levels.push_back({rate, cost, restart});
    rate /= std::pow(10.0, 0.4 + 1.1 * rng.next_unit());
    cost *= 1.4 + 1.6 * rng.next_unit();
    restart *= 1.4 + 1.6 * rng.next_unit();
  }
  if (with_topology) {
    s.topology = TopologySpec{1 + static_cast<int>(rng.next_unit() * 30),
                              rng.next_unit() * 1.5};
  }
  std::vector<double> p(level_count);
  double sum = 0.0;
  for (double& v : p) {
    v = 0.08 + rng.next_unit();
    sum += v;
  }
  for (double& v : p) v /= sum;
  double mean_cost = 0.0;
  double total_rate = 0.0;
  for (std::size_t l = 0; l < level_count; ++l) {
    mean_cost += p[l] * s.levels[l].checkpoint_cost;
    total_rate += s.levels[l].failure_rate;
  }
  const double t_lo = std::max(s.levels.back().checkpoint_cost, mean_cost) * 1.3;
  const double t_hi = 0.45 / total_rate;
  const double interval =
      t_hi > t_lo ? t_lo + (t_hi - t_lo) * rng.next_unit() : t_lo * (1.0 + rng.next_unit());
  s.policy = Policy{interval, std::move(p)};
  return s;
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace mlckpt::testing
