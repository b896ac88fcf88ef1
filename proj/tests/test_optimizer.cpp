#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "mlckpt/model.hpp"
#include "mlckpt/numerics.hpp"
#include "mlckpt/optimizer.hpp"

using namespace mlckpt;
using mlckpt::testing::per_day;
using mlckpt::testing::random_scenario;

namespace {

SystemSpec table1_spec(double lambda2_per_day) {
  return SystemSpec({{per_day(50.0), 20.0, 20.0}, {per_day(lambda2_per_day), 50.0, 50.0}});
}

// exact Euclidean projection onto the probability simplex
std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  int support = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("reproduces the first Table 1 row") {
    const auto result = optimize(table1_spec(0.5));
    CHECK(std::abs(result.best_policy.interval - 268.0672) <= 0.5);
    CHECK(std::abs(result.best_policy.probabilities[0] - 0.8897) <= 0.005);
    CHECK(std::abs(result.best_utilization - 0.8206) <= 0.001);
    CHECK(result.converged);
    CHECK(result.best_utilization > 0.0);
    CHECK(result.best_utilization < 1.0);
  }

  TEST_CASE("single-level optimum matches a dense grid oracle") {
    SystemSpec spec({{per_day(50.5), 50.0, 50.0}});
    const auto result = optimize(spec);
    double best_u = -1.0;
    double best_t = 0.0;
    for (double t = 51.0; t <= 2000.0; t += 0.1) {
      const double u = evaluate_llevel(spec, Policy{t, {1.0}}).utilization;
      if (u > best_u) {
        best_u = u;
        best_t = t;
      }
    }
    CHECK(std::abs(result.best_policy.interval - best_t) <= 0.1);
    CHECK(result.best_utilization >= best_u - 1e-9);
  }

  TEST_CASE("optimal p1 drifts toward zero for large intervals") {
    const SystemSpec spec = table1_spec(0.5);
    const auto joint = optimize(spec);
    const double t_star = joint.best_policy.interval;
    const auto at_optimum = optimize_fixed_interval(spec, t_star);
    OptimizerConfig wide;
    wide.interval_hi = 12.0 * t_star;
    const auto far_out = optimize_fixed_interval(spec, 10.0 * t_star, wide);
    CHECK(far_out.best_policy.probabilities[0] < at_optimum.best_policy.probabilities[0]);
  }

  TEST_CASE("fixed probabilities (0,1) recover the folded 1-level Lambert optimum") {
    const SystemSpec spec = table1_spec(0.5);
    const double probabilities[2] = {0.0, 1.0};
    const auto result = optimize_fixed_probabilities(spec, probabilities);
    const double total = per_day(50.5);
    const double closed_form = 50.0 + (lambert_w0(-std::exp(-total * 50.0 - 1.0)) + 1.0) / total;
    CHECK(std::abs(result.best_policy.interval - closed_form) <= 0.05);
  }

  TEST_CASE("fixed-interval optimum at T* agrees with the joint optimum") {
    const SystemSpec spec = table1_spec(0.5);
    const auto joint = optimize(spec);
    const auto conditional = optimize_fixed_interval(spec, joint.best_policy.interval);
    CHECK(std::abs(conditional.best_policy.probabilities[0] -
                   joint.best_policy.probabilities[0]) <= 0.005);
    CHECK(conditional.best_utilization >= joint.best_utilization - 1e-7);
  }

  TEST_CASE("local optimality of the reported optimum") {
    const SystemSpec spec = table1_spec(1.0);
    const auto result = optimize(spec);
    const double u_star = result.best_utilization;
    const Policy& best = result.best_policy;
    for (double dt : {-0.1, 0.1}) {
      const double u = evaluate(spec, Policy{best.interval + dt, best.probabilities}).utilization;
      CHECK(u <= u_star + 1e-9);
    }
    for (std::size_t i = 0; i < best.probabilities.size(); ++i) {
      for (double dp : {-1e-3, 1e-3}) {
        std::vector<double> p = best.probabilities;
        p[i] += dp;
        p = project_simplex(std::move(p));
        const double u = evaluate(spec, Policy{best.interval, p}).utilization;
        CHECK(u <= u_star + 1e-9);
      }
    }
  }

  TEST_CASE("deterministic given the seed") {
    OptimizerConfig config;
    config.seed = 424242;
    const auto a = optimize(table1_spec(5.0), config);
    const auto b = optimize(table1_spec(5.0), config);
    CHECK(a.best_policy.interval == b.best_policy.interval);
    CHECK(a.best_policy.probabilities == b.best_policy.probabilities);
    CHECK(a.best_utilization == b.best_utilization);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.plateau_width == b.plateau_width);
  }

  TEST_CASE("more multistarts never lose utilization") {
    Philox4x64 rng(90, 9);
    for (int i = 0; i < 6; ++i) {
      const auto scenario = random_scenario(rng, 2, i % 2 == 0);
      const SystemSpec spec = scenario.spec();
      OptimizerConfig one;
      one.multistarts = 1;
      OptimizerConfig eight;
      eight.multistarts = 8;
      CHECK(optimize(spec, eight).best_utilization >=
            optimize(spec, one).best_utilization - 1e-9);
    }
  }

  TEST_CASE("level comparison reproduces a Table 1 row end to end") {
    const auto rows = compare_levels(table1_spec(0.5));
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[1].policy.interval - 268.0672) <= 0.5);
    CHECK(std::abs(rows[1].policy.probabilities[0] - 0.8897) <= 0.005);
    CHECK(std::abs(rows[1].utilization - 0.8206) <= 0.001);
    CHECK(std::abs(rows[0].utilization - 0.7549) <= 0.001);
    CHECK(std::abs(rows[1].pct_increase - 8.6943) <= 0.15);
    CHECK(rows[0].pct_increase == 0.0);
  }

  TEST_CASE("the 2-level gain shrinks as the rates approach each other") {
    const auto tight = compare_levels(table1_spec(10.0));
    const auto loose = compare_levels(table1_spec(0.5));
    CHECK(tight[1].pct_increase < loose[1].pct_increase);
    CHECK(tight[1].pct_increase > 0.0);
  }

  TEST_CASE("single comparison row agrees with the full table") {
    const SystemSpec spec = table1_spec(5.0);
    const auto rows = compare_levels(spec);
    const auto row = compare_levels_row(spec, {}, 2);
    CHECK(row.utilization == rows[1].utilization);
    CHECK(row.pct_increase == rows[1].pct_increase);
  }

  TEST_CASE("errors on infeasible bounds and diverging regions") {
    OptimizerConfig bad;
    bad.interval_lo = 500.0;
    bad.interval_hi = 100.0;
    CHECK_THROWS_AS((void)optimize(table1_spec(0.5), bad), error);

    // every interval in these bounds diverges for this policy shape
    SystemSpec hot({{per_day(2000), 10, 10}, {per_day(1500), 30, 30}}, std::nullopt, true);
    OptimizerConfig far;
    far.interval_lo = 4e5;
    far.interval_hi = 1e6;
    const double probabilities[2] = {0.999, 0.001};
    CHECK_THROWS_AS((void)optimize_fixed_probabilities(hot, probabilities, far), error);
  }

  TEST_CASE("plateau width is reported and covers the near-optimal range") {
    const auto result = optimize(table1_spec(0.5));
    REQUIRE(result.plateau_width.has_value());
    CHECK(*result.plateau_width > 1.0);  // the paper's plateau is wide
    const SystemSpec spec = table1_spec(0.5);
    const double edge = result.best_policy.interval + 0.49 * *result.plateau_width;
    const double u_edge = evaluate(spec, Policy{edge, result.best_policy.probabilities}).utilization;
    CHECK(u_edge >= result.best_utilization - 1.2e-4);
  }
}
