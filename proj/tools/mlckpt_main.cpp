// mlckpt command-line front end. Talks to the core exclusively through the
// C API in mlckpt/mlckpt.h; configs are strict JSON with explicit unit tags.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlckpt/mlckpt.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void die_config(const std::string& message) { throw CliError{kExitConfig, message}; }

int exit_code_for(mlckpt_status status) {
  switch (status) {
    case MLCKPT_OK:
      return kExitOk;
    case MLCKPT_ERR_POLICY_DIVERGES:
    case MLCKPT_ERR_DOMAIN:
    case MLCKPT_ERR_NO_CONVERGENCE:
      return kExitNumeric;
    default:
      return kExitConfig;
  }
}

void check(mlckpt_status status, const std::string& where) {
  if (status == MLCKPT_OK) return;
  throw CliError{exit_code_for(status),
                 where + ": " + mlckpt_status_name(status) + " (" + mlckpt_last_error() + ")"};
}

// ---- strict config parsing -------------------------------------------------

void require_keys(const json& object, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& context) {
  if (!object.is_object()) die_config(context + " must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) die_config(context + ": unknown key '" + key + "'");
  }
  for (const std::string& key : required) {
    if (!object.contains(key)) die_config(context + ": missing key '" + key + "'");
  }
}

double number_at(const json& j, const std::string& context) {
  if (!j.is_number()) die_config(context + " must be a number");
  return j.get<double>();
}

// {"value": x, "unit": "per_day" | "per_second"} -> failures per second
double parse_rate(const json& j, const std::string& context) {
  require_keys(j, {"value", "unit"}, {"value", "unit"}, context);
  const double value = number_at(j.at("value"), context + ".value");
  const std::string unit = j.at("unit").is_string() ? j.at("unit").get<std::string>() : "";
  if (unit == "per_day") return value / 86400.0;
  if (unit == "per_second") return value;
  die_config(context + ".unit must be 'per_day' or 'per_second'");
}

// {"value": x, "unit": "seconds"} -> seconds
double parse_seconds(const json& j, const std::string& context) {
  require_keys(j, {"value", "unit"}, {"value", "unit"}, context);
  const double value = number_at(j.at("value"), context + ".value");
  const std::string unit = j.at("unit").is_string() ? j.at("unit").get<std::string>() : "";
  if (unit != "seconds") die_config(context + ".unit must be 'seconds'");
  return value;
}

struct SystemHandle {
  mlckpt_system* ptr = nullptr;
  ~SystemHandle() { mlckpt_system_destroy(ptr); }
};

struct PolicyHandle {
  mlckpt_policy* ptr = nullptr;
  ~PolicyHandle() { mlckpt_policy_destroy(ptr); }
};

void parse_system(const json& config, SystemHandle& system) {
  if (!config.contains("system")) die_config("config: missing key 'system'");
  const json& sys = config.at("system");
  require_keys(sys, {"levels", "topology", "allow_unordered_levels"}, {"levels"}, "system");
  const json& levels = sys.at("levels");
  if (!levels.is_array() || levels.empty()) die_config("system.levels must be a non-empty array");
  std::vector<double> rates, costs, restarts;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string context = "system.levels[" + std::to_string(i) + "]";
    const json& level = levels.at(i);
    require_keys(level, {"failure_rate", "checkpoint_cost", "restart_cost"},
                 {"failure_rate", "checkpoint_cost", "restart_cost"}, context);
    rates.push_back(parse_rate(level.at("failure_rate"), context + ".failure_rate"));
    costs.push_back(parse_seconds(level.at("checkpoint_cost"), context + ".checkpoint_cost"));
    restarts.push_back(parse_seconds(level.at("restart_cost"), context + ".restart_cost"));
  }
  int allow_unordered = 0;
  if (sys.contains("allow_unordered_levels")) {
    if (!sys.at("allow_unordered_levels").is_boolean()) {
      die_config("system.allow_unordered_levels must be a boolean");
    }
    allow_unordered = sys.at("allow_unordered_levels").get<bool>() ? 1 : 0;
  }
  check(mlckpt_system_create(rates.data(), costs.data(), restarts.data(), rates.size(),
                             allow_unordered, &system.ptr),
        "system");
  if (sys.contains("topology")) {
    const json& topo = sys.at("topology");
    require_keys(topo, {"critical_path_operators", "hop_delay"},
                 {"critical_path_operators", "hop_delay"}, "system.topology");
    if (!topo.at("critical_path_operators").is_number_integer()) {
      die_config("system.topology.critical_path_operators must be an integer");
    }
    check(mlckpt_system_set_topology(
              system.ptr, topo.at("critical_path_operators").get<int>(),
              parse_seconds(topo.at("hop_delay"), "system.topology.hop_delay")),
          "system.topology");
  }
}

void parse_policy(const json& config, const SystemHandle& system, PolicyHandle& policy) {
  if (!config.contains("policy")) die_config("config: missing key 'policy'");
  const json& pol = config.at("policy");
  require_keys(pol, {"interval", "probabilities"}, {"interval", "probabilities"}, "policy");
  const double interval = parse_seconds(pol.at("interval"), "policy.interval");
  const json& probs = pol.at("probabilities");
  if (!probs.is_array() || probs.size() != mlckpt_system_levels(system.ptr)) {
    die_config("policy.probabilities must be an array with one entry per level");
  }
  std::vector<double> p;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    p.push_back(number_at(probs.at(i), "policy.probabilities[" + std::to_string(i) + "]"));
  }
  check(mlckpt_policy_create(interval, p.data(), p.size(), &policy.ptr), "policy");
}

mlckpt_optimizer_config parse_optimizer(const json& config, std::optional<std::uint64_t> seed) {
  mlckpt_optimizer_config c{};
  if (config.contains("optimizer")) {
    const json& opt = config.at("optimizer");
    require_keys(opt,
                 {"interval_lo", "interval_hi", "multistarts", "simplex_tolerance",
                  "interval_tolerance", "seed"},
                 {}, "optimizer");
    if (opt.contains("interval_lo")) c.interval_lo = parse_seconds(opt.at("interval_lo"), "optimizer.interval_lo");
    if (opt.contains("interval_hi")) c.interval_hi = parse_seconds(opt.at("interval_hi"), "optimizer.interval_hi");
    if (opt.contains("multistarts")) c.multistarts = static_cast<int>(number_at(opt.at("multistarts"), "optimizer.multistarts"));
    if (opt.contains("simplex_tolerance")) c.simplex_tolerance = number_at(opt.at("simplex_tolerance"), "optimizer.simplex_tolerance");
    if (opt.contains("interval_tolerance")) c.interval_tolerance = parse_seconds(opt.at("interval_tolerance"), "optimizer.interval_tolerance");
    if (opt.contains("seed")) c.seed = static_cast<std::uint64_t>(number_at(opt.at("seed"), "optimizer.seed"));
  }
  if (!config.contains("optimizer") || !config.at("optimizer").contains("seed")) c.seed = 1;
  if (seed) c.seed = *seed;
  return c;
}

struct SimulationSettings {
  mlckpt_simulation_config config{};
  std::string event_log;  // keeps the c_str alive
  std::vector<int> level_sequence;
};

SimulationSettings parse_simulation(const json& config, std::optional<std::uint64_t> seed,
                                    bool required) {
  SimulationSettings s;
  if (!config.contains("simulation")) {
    if (required) die_config("config: missing key 'simulation'");
    if (seed) s.config.seed = *seed;
    return s;
  }
  const json& sim = config.at("simulation");
  require_keys(sim,
               {"duration", "replicas", "seed", "restart_failure_scope", "event_log",
                "level_sequence", "max_threads"},
               {}, "simulation");
  if (sim.contains("duration")) s.config.duration_seconds = parse_seconds(sim.at("duration"), "simulation.duration");
  if (sim.contains("replicas")) s.config.replicas = static_cast<int>(number_at(sim.at("replicas"), "simulation.replicas"));
  if (sim.contains("seed")) s.config.seed = static_cast<std::uint64_t>(number_at(sim.at("seed"), "simulation.seed"));
  if (sim.contains("restart_failure_scope")) {
    const std::string scope = sim.at("restart_failure_scope").is_string()
                                  ? sim.at("restart_failure_scope").get<std::string>()
                                  : "";
    if (scope == "paper_assumption") {
      s.config.restart_failure_scope = 0;
    } else if (scope == "all_levels") {
      s.config.restart_failure_scope = 1;
    } else {
      die_config("simulation.restart_failure_scope must be 'paper_assumption' or 'all_levels'");
    }
  }
  if (sim.contains("event_log")) {
    if (!sim.at("event_log").is_string()) die_config("simulation.event_log must be a string path");
    s.event_log = sim.at("event_log").get<std::string>();
    s.config.event_log_path = s.event_log.c_str();
  }
  if (sim.contains("level_sequence")) {
    const json& seq = sim.at("level_sequence");
    if (!seq.is_array() || seq.empty()) die_config("simulation.level_sequence must be a non-empty array");
    for (const json& v : seq) {
      if (!v.is_number_integer()) die_config("simulation.level_sequence entries must be integers");
      s.level_sequence.push_back(v.get<int>());
    }
    s.config.level_sequence = s.level_sequence.data();
    s.config.level_sequence_len = s.level_sequence.size();
  }
  if (sim.contains("max_threads")) s.config.max_threads = static_cast<int>(number_at(sim.at("max_threads"), "simulation.max_threads"));
  if (seed) s.config.seed = *seed;
  return s;
}

// ---- output ------------------------------------------------------------------

enum class Format { human, json_doc, csv };

struct Output {
  Format format = Format::human;
  std::string path;  // empty = stdout

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) die_config("cannot open output path " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
};

Output resolve_output(const json& config, const std::string& flag_format,
                      const std::string& flag_out) {
  Output out;
  std::string format;
  if (config.contains("output")) {
    const json& o = config.at("output");
    require_keys(o, {"format", "path"}, {}, "output");
    if (o.contains("format")) {
      if (!o.at("format").is_string()) die_config("output.format must be a string");
      format = o.at("format").get<std::string>();
    }
    if (o.contains("path")) {
      if (!o.at("path").is_string()) die_config("output.path must be a string");
      out.path = o.at("path").get<std::string>();
    }
  }
  if (!flag_format.empty()) format = flag_format;
  if (!flag_out.empty()) out.path = flag_out;
  if (format.empty() || format == "human") {
    out.format = Format::human;
  } else if (format == "json") {
    out.format = Format::json_doc;
  } else if (format == "csv") {
    out.format = Format::csv;
  } else {
    die_config("output format must be 'human', 'json' or 'csv'");
  }
  return out;
}

std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) die_config("cannot open config file " + path);
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    die_config("config parse error: " + std::string(e.what()));
  }
  return config;
}

void check_config_keys(const json& config, const std::set<std::string>& allowed) {
  require_keys(config, allowed, {}, "config");
}

// ---- subcommands ----------------------------------------------------------------

int cmd_evaluate(const json& config, const Output& output) {
  check_config_keys(config, {"system", "policy", "output"});
  SystemHandle system;
  PolicyHandle policy;
  parse_system(config, system);
  parse_policy(config, system, policy);
  const std::size_t levels = mlckpt_system_levels(system.ptr);
  mlckpt_evaluation eval{};
  std::vector<double> recovery(levels, 0.0);
  check(mlckpt_evaluate(system.ptr, policy.ptr, &eval, recovery.data()), "evaluate");
  if (output.format == Format::json_doc) {
    json doc{{"utilization", eval.utilization},
             {"effective_period", eval.effective_period},
             {"mean_checkpoint_cost", eval.mean_checkpoint_cost},
             {"per_level_recovery_cost", recovery}};
    output.emit(doc.dump(2));
  } else if (output.format == Format::csv) {
    std::ostringstream csv;
    csv << "utilization,effective_period,mean_checkpoint_cost";
    for (std::size_t i = 0; i < levels; ++i) csv << ",recovery_cost_" << i + 1;
    csv << "\n" << csv_number(eval.utilization) << "," << csv_number(eval.effective_period) << ","
        << csv_number(eval.mean_checkpoint_cost);
    for (double r : recovery) csv << "," << csv_number(r);
    csv << "\n";
    output.emit(csv.str());
  } else {
    std::ostringstream text;
    text << "utilization           " << human(eval.utilization) << "\n"
         << "effective period      " << human(eval.effective_period) << " s\n"
         << "mean checkpoint cost  " << human(eval.mean_checkpoint_cost) << " s\n";
    for (std::size_t i = 0; i < levels; ++i) {
      text << "recovery cost R_" << i + 1 << "     " << human(recovery[i]) << " s\n";
    }
    output.emit(text.str());
  }
  return kExitOk;
}

json optimization_to_json(const mlckpt_optimization_summary& summary,
                          const std::vector<double>& probabilities) {
  return json{{"interval", summary.best_interval},
              {"probabilities", probabilities},
              {"utilization", summary.best_utilization},
              {"plateau_width", summary.plateau_width},
              {"evaluations", summary.evaluations},
              {"restarts_used", summary.restarts_used},
              {"converged", summary.converged != 0}};
}

std::string optimization_to_human(const mlckpt_optimization_summary& summary,
                                  const std::vector<double>& probabilities) {
  std::ostringstream text;
  text << "optimal interval T*   " << human(summary.best_interval) << " s\n";
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    text << "optimal p_" << i + 1 << "           " << human(probabilities[i]) << "\n";
  }
  text << "utilization U*        " << human(summary.best_utilization) << "\n"
       << "plateau width         " << human(summary.plateau_width) << " s\n"
       << "evaluations           " << summary.evaluations << "\n"
       << "converged             " << (summary.converged ? "yes" : "no") << "\n";
  return text.str();
}

int cmd_optimize(const json& config, const Output& output, std::optional<std::uint64_t> seed) {
  check_config_keys(config, {"system", "optimizer", "output"});
  SystemHandle system;
  parse_system(config, system);
  const mlckpt_optimizer_config oc = parse_optimizer(config, seed);
  const std::size_t levels = mlckpt_system_levels(system.ptr);
  mlckpt_optimization_summary summary{};
  std::vector<double> probabilities(levels, 0.0);
  check(mlckpt_optimize(system.ptr, &oc, &summary, probabilities.data()), "optimize");
  if (output.format == Format::json_doc) {
    output.emit(optimization_to_json(summary, probabilities).dump(2));
  } else if (output.format == Format::csv) {
    std::ostringstream csv;
    csv << "T_star";
    for (std::size_t i = 0; i < levels; ++i) csv << ",p_star_" << i + 1;
    csv << ",U,plateau_width,evaluations,converged\n" << csv_number(summary.best_interval);
    for (double p : probabilities) csv << "," << csv_number(p);
    csv << "," << csv_number(summary.best_utilization) << ","
        << csv_number(summary.plateau_width) << "," << summary.evaluations << ","
        << (summary.converged ? 1 : 0) << "\n";
    output.emit(csv.str());
  } else {
    output.emit(optimization_to_human(summary, probabilities));
  }
  return kExitOk;
}

int cmd_approx(const json& config, const Output& output) {
  check_config_keys(config, {"system", "output"});
  SystemHandle system;
  parse_system(config, system);
  double interval = 0.0;
  double p1 = 0.0;
  int converged = 0;
  check(mlckpt_approx_fixed_point(system.ptr, &interval, &p1, &converged), "approx");
  if (output.format == Format::json_doc) {
    output.emit(json{{"interval", interval}, {"p1", p1}, {"converged", converged != 0}}.dump(2));
  } else if (output.format == Format::csv) {
    std::ostringstream csv;
    csv << "T_star,p1_star,converged\n"
        << csv_number(interval) << "," << csv_number(p1) << "," << converged << "\n";
    output.emit(csv.str());
  } else {
    std::ostringstream text;
    text << "approximate T*        " << human(interval) << " s\n"
         << "approximate p_1*      " << human(p1) << "\n"
         << "fixed point converged " << (converged ? "yes" : "no") << "\n";
    output.emit(text.str());
  }
  return kExitOk;
}

int cmd_simulate(const json& config, const Output& output, std::optional<std::uint64_t> seed) {
  check_config_keys(config, {"system", "policy", "simulation", "output"});
  SystemHandle system;
  PolicyHandle policy;
  parse_system(config, system);
  parse_policy(config, system, policy);
  SimulationSettings settings = parse_simulation(config, seed, /*required=*/true);
  const std::size_t levels = mlckpt_system_levels(system.ptr);
  const int replicas = settings.config.replicas > 0 ? settings.config.replicas : 100;
  mlckpt_simulation_summary summary{};
  std::vector<double> per_replica(static_cast<std::size_t>(replicas), 0.0);
  std::vector<std::uint64_t> failures(levels, 0);
  check(mlckpt_simulate(system.ptr, policy.ptr, &settings.config, &summary, per_replica.data(),
                        failures.data()),
        "simulate");
  if (output.format == Format::json_doc) {
    json doc{{"mean", summary.mean},
             {"std_dev", summary.std_dev},
             {"duration", summary.duration},
             {"replicas", replicas},
             {"per_replica_utilization", per_replica},
             {"failures_per_level", failures},
             {"checkpoints_completed", summary.checkpoints_completed},
             {"checkpoints_discarded", summary.checkpoints_discarded},
             {"restart_attempts", summary.restart_attempts}};
    output.emit(doc.dump(2));
  } else if (output.format == Format::csv) {
    std::ostringstream csv;
    csv << "replica,utilization\n";
    for (int r = 0; r < replicas; ++r) {
      csv << r << "," << csv_number(per_replica[static_cast<std::size_t>(r)]) << "\n";
    }
    output.emit(csv.str());
  } else {
    std::ostringstream text;
    text << "mean utilization      " << human(summary.mean) << "\n"
         << "std dev               " << human(summary.std_dev) << "\n"
         << "replicas              " << replicas << "\n"
         << "duration              " << human(summary.duration) << " s\n";
    for (std::size_t i = 0; i < levels; ++i) {
      text << "failures level " << i + 1 << "      " << failures[i] << "\n";
    }
    text << "checkpoints completed " << summary.checkpoints_completed << "\n"
         << "checkpoints discarded " << summary.checkpoints_discarded << "\n"
         << "restart attempts      " << summary.restart_attempts << "\n";
    output.emit(text.str());
  }
  return kExitOk;
}

int cmd_compare(const json& config, const Output& output, std::optional<std::uint64_t> seed) {
  check_config_keys(config, {"system", "optimizer", "output"});
  SystemHandle system;
  parse_system(config, system);
  const mlckpt_optimizer_config oc = parse_optimizer(config, seed);
  const std::size_t levels = mlckpt_system_levels(system.ptr);
  json rows = json::array();
  for (std::size_t k = 1; k <= levels; ++k) {
    mlckpt_optimization_summary summary{};
    std::vector<double> probabilities(levels, 0.0);
    double pct = 0.0;
    check(mlckpt_compare_levels(system.ptr, &oc, static_cast<int>(k), &summary,
                                probabilities.data(), &pct),
          "compare");
    rows.push_back(json{{"levels", k},
                        {"interval", summary.best_interval},
                        {"probabilities", probabilities},
                        {"utilization", summary.best_utilization},
                        {"pct_increase", pct}});
  }
  if (output.format == Format::json_doc) {
    output.emit(rows.dump(2));
  } else if (output.format == Format::csv) {
    std::ostringstream csv;
    csv << "levels,T_star";
    for (std::size_t i = 0; i < levels; ++i) csv << ",p_star_" << i + 1;
    csv << ",U,pct_increase\n";
    for (const json& row : rows) {
      csv << row.at("levels").get<int>() << "," << csv_number(row.at("interval").get<double>());
      for (const json& p : row.at("probabilities")) csv << "," << csv_number(p.get<double>());
      csv << "," << csv_number(row.at("utilization").get<double>()) << ","
          << csv_number(row.at("pct_increase").get<double>()) << "\n";
    }
    output.emit(csv.str());
  } else {
    std::ostringstream text;
    for (const json& row : rows) {
      text << row.at("levels").get<int>() << " level(s): T*=" << human(row.at("interval").get<double>())
           << " s, p*=(";
      const auto& ps = row.at("probabilities");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        text << (i ? ", " : "") << human(ps.at(i).get<double>());
      }
      text << "), U=" << human(row.at("utilization").get<double>())
           << ", %U increase=" << human(row.at("pct_increase").get<double>()) << "\n";
    }
    output.emit(text.str());
  }
  return kExitOk;
}

std::vector<double> parse_range(const json& j, const std::string& context, bool tagged_seconds) {
  require_keys(j, {"from", "to", "steps"}, {"from", "to", "steps"}, context);
  const double from = tagged_seconds ? parse_seconds(j.at("from"), context + ".from")
                                     : number_at(j.at("from"), context + ".from");
  const double to = tagged_seconds ? parse_seconds(j.at("to"), context + ".to")
                                   : number_at(j.at("to"), context + ".to");
  if (!j.at("steps").is_number_integer()) die_config(context + ".steps must be an integer");
  const int steps = j.at("steps").get<int>();
  if (steps < 1) die_config(context + ".steps must be >= 1");
  std::vector<double> values;
  for (int i = 0; i <= steps; ++i) {
    values.push_back(steps == 0 ? from : from + (to - from) * i / steps);
  }
  return values;
}

int cmd_sweep(const json& config, const Output& output, std::optional<std::uint64_t> seed) {
  check_config_keys(config, {"system", "policy", "simulation", "sweep", "output"});
  if (!config.contains("sweep")) die_config("config: missing key 'sweep'");
  SystemHandle system;
  parse_system(config, system);
  const json& sweep = config.at("sweep");
  if (!sweep.is_object() || !sweep.contains("kind")) die_config("sweep.kind is required");
  const std::string kind = sweep.at("kind").is_string() ? sweep.at("kind").get<std::string>() : "";

  if (kind == "analytic_grid") {
    // closed-form utilization over a T x p1 grid (2-level systems)
    check_config_keys(config, {"system", "sweep", "output"});
    require_keys(sweep, {"kind", "interval", "p1"}, {"kind", "interval", "p1"}, "sweep");
    if (mlckpt_system_levels(system.ptr) != 2) {
      die_config("sweep.analytic_grid requires a 2-level system");
    }
    const std::vector<double> intervals = parse_range(sweep.at("interval"), "sweep.interval", true);
    const std::vector<double> p1s = parse_range(sweep.at("p1"), "sweep.p1", false);
    std::ostringstream csv;
    json points = json::array();
    csv << "T,p1,utilization\n";
    for (double interval : intervals) {
      for (double p1 : p1s) {
        const double probabilities[2] = {p1, 1.0 - p1};
        PolicyHandle policy;
        mlckpt_evaluation eval{};
        double utilization = std::numeric_limits<double>::quiet_NaN();
        if (mlckpt_policy_create(interval, probabilities, 2, &policy.ptr) == MLCKPT_OK &&
            mlckpt_evaluate(system.ptr, policy.ptr, &eval, nullptr) == MLCKPT_OK) {
          utilization = eval.utilization;  // infeasible/diverging cells stay NaN
        }
        if (output.format == Format::json_doc) {
          points.push_back(json{{"T", interval}, {"p1", p1}, {"utilization", utilization}});
        } else {
          csv << csv_number(interval) << "," << csv_number(p1) << "," << csv_number(utilization)
              << "\n";
        }
      }
    }
    output.emit(output.format == Format::json_doc ? points.dump(2) : csv.str());
    return kExitOk;
  }

  if (kind == "simulate") {
    PolicyHandle policy;
    parse_policy(config, system, policy);
    require_keys(sweep, {"kind", "axis", "level", "values", "unit"}, {"kind", "axis", "values"},
                 "sweep");
    const std::string axis_name = sweep.at("axis").is_string() ? sweep.at("axis").get<std::string>() : "";
    mlckpt_sweep_axis axis;
    bool needs_level = false;
    if (axis_name == "interval") {
      axis = MLCKPT_SWEEP_INTERVAL;
    } else if (axis_name == "probability") {
      axis = MLCKPT_SWEEP_PROBABILITY;
      needs_level = true;
    } else if (axis_name == "operators") {
      axis = MLCKPT_SWEEP_OPERATORS;
    } else if (axis_name == "failure_rate") {
      axis = MLCKPT_SWEEP_FAILURE_RATE;
      needs_level = true;
    } else {
      die_config("sweep.axis must be interval, probability, operators or failure_rate");
    }
    int level = 1;
    if (needs_level) {
      if (!sweep.contains("level") || !sweep.at("level").is_number_integer()) {
        die_config("sweep.level (integer) is required for this axis");
      }
      level = sweep.at("level").get<int>();
    }
    double scale = 1.0;
    if (axis == MLCKPT_SWEEP_FAILURE_RATE) {
      if (!sweep.contains("unit") || !sweep.at("unit").is_string()) {
        die_config("sweep.unit ('per_day' or 'per_second') is required for failure_rate sweeps");
      }
      const std::string unit = sweep.at("unit").get<std::string>();
      if (unit == "per_day") {
        scale = 1.0 / 86400.0;
      } else if (unit != "per_second") {
        die_config("sweep.unit must be 'per_day' or 'per_second'");
      }
    } else if (sweep.contains("unit")) {
      die_config("sweep.unit is only valid for failure_rate sweeps");
    }
    if (!sweep.at("values").is_array() || sweep.at("values").empty()) {
      die_config("sweep.values must be a non-empty array");
    }
    std::vector<double> values;
    for (const json& v : sweep.at("values")) {
      values.push_back(number_at(v, "sweep.values") * scale);
    }
    SimulationSettings settings = parse_simulation(config, seed, /*required=*/false);
    std::vector<mlckpt_simulation_summary> summaries(values.size());
    check(mlckpt_simulate_sweep(system.ptr, policy.ptr, &settings.config, axis, level,
                                values.data(), values.size(), summaries.data()),
          "sweep");
    if (output.format == Format::json_doc) {
      json points = json::array();
      for (std::size_t i = 0; i < values.size(); ++i) {
        points.push_back(json{{"value", values[i]},
                              {"mean", summaries[i].mean},
                              {"std_dev", summaries[i].std_dev}});
      }
      output.emit(points.dump(2));
    } else {
      std::ostringstream csv;
      csv << "value,mean,std_dev\n";
      for (std::size_t i = 0; i < values.size(); ++i) {
        csv << csv_number(values[i]) << "," << csv_number(summaries[i].mean) << ","
            << csv_number(summaries[i].std_dev) << "\n";
      }
      output.emit(csv.str());
    }
    return kExitOk;
  }

  die_config("sweep.kind must be 'analytic_grid' or 'simulate'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planning and validation toolkit for probabilistic multi-level checkpointing"};
  app.require_subcommand(1);

  std::string config_path, format, out_path;
  std::int64_t seed_flag = -1;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--format", format, "output format: human, json or csv");
    cmd->add_option("--seed", seed_flag, "override config seeds");
    cmd->add_option("--out", out_path, "write output to this path instead of stdout");
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "closed-form utilization of a policy");
  CLI::App* optimize = app.add_subcommand("optimize", "find the utilization-maximizing policy");
  CLI::App* approx = app.add_subcommand("approx", "Lambert-W approximate optimum (2 levels)");
  CLI::App* simulate = app.add_subcommand("simulate", "stochastic discrete-event simulation");
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate utilization over a grid or axis");
  CLI::App* compare = app.add_subcommand("compare", "compare level counts at their optima");
  for (CLI::App* cmd : {evaluate, optimize, approx, simulate, sweep, compare}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    const json config = load_config(config_path);
    const Output output = resolve_output(config, format, out_path);
    std::optional<std::uint64_t> seed;
    if (seed_flag >= 0) seed = static_cast<std::uint64_t>(seed_flag);
    if (evaluate->parsed()) return cmd_evaluate(config, output);
    if (optimize->parsed()) return cmd_optimize(config, output, seed);
    if (approx->parsed()) return cmd_approx(config, output);
    if (simulate->parsed()) return cmd_simulate(config, output, seed);
    if (sweep->parsed()) return cmd_sweep(config, output, seed);
    if (compare->parsed()) return cmd_compare(config, output, seed);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
