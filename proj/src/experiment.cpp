#include "imdp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "imdp/policy.hpp"
#include "imdp/serialization.hpp"

namespace imdp {

using nlohmann::json;
namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (iterations < 1) throw UsageError("--iters must be >= 1");
  if (seeds.empty()) throw UsageError("at least one seed is required");
  if (eval.trials < 1) throw UsageError("--trials must be >= 1");
  if (eval.dt_sim && !(*eval.dt_sim > 0.0)) throw UsageError("--dt-sim must be positive");
  if (eval.t_max && !(*eval.t_max > 0.0)) throw UsageError("--t-max must be positive");
  if (probes && *probes < 2) throw UsageError("--probes must be >= 2");
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end())
    throw UsageError("unknown scenario: " + scenario);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto dash = item.find('-', 1);
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw UsageError("bad seed range: " + item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad seed list: " + text);
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scenario") c.scenario = value.get<std::string>();
      else if (key == "scenario_config") c.scenario_config = value;
      else if (key == "params") c.params = value;
      else if (key == "iterations") c.iterations = value.get<std::size_t>();
      else if (key == "seeds") c.seeds = value.is_string() ? parse_seed_list(value.get<std::string>())
                                                           : value.get<std::vector<std::uint64_t>>();
      else if (key == "out") c.out_dir = value.get<std::string>();
      else if (key == "probes") c.probes = value.get<int>();
      else if (key == "eval") {
        for (const auto& [k, v] : value.items()) {
          if (k == "trials") c.eval.trials = v.get<std::size_t>();
          else if (k == "dt_sim") c.eval.dt_sim = v.get<double>();
          else if (k == "t_max") c.eval.t_max = v.get<double>();
          else if (k == "start") c.eval.start = v.get<std::vector<double>>();
          else throw UsageError("unknown eval key: " + k);
        }
      } else {
        throw UsageError("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  return c;
}

Scenario resolve_scenario(const RunConfig& config) {
  try {
    return make_scenario(config.scenario, config.scenario_config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

AlgoParams resolve_params(const RunConfig& config, const Scenario& scenario, std::uint64_t seed) {
  AlgoParams p;
  try {
    p = params_from_json(config.params, scenario.params);
    p.seed = seed;
    p.validate();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad parameter value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::vector<Vector> resolve_probes(const RunConfig& config, const Scenario& scenario) {
  if (config.probes && scenario.problem->dim_x() == 1) {
    const Box& b = scenario.problem->state_box();
    return grid_1d(b.lo[0], b.hi[0], *config.probes);
  }
  return scenario.probes;
}

std::string stem(const RunConfig& config, std::uint64_t seed) {
  return config.scenario + "_s" + std::to_string(seed);
}

BuildResult build_model(const RunConfig& config, std::uint64_t seed, const Planner::Callback& callback) {
  Scenario scenario = resolve_scenario(config);
  const AlgoParams params = resolve_params(config, scenario, seed);
  auto probes = resolve_probes(config, scenario);
  Planner planner(scenario.problem, params, probes);
  auto traces = planner.run(config.iterations, callback);
  return {std::move(scenario), params, std::move(probes), planner.model(), std::move(traces)};
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

double sup_error(const Scenario& s, const std::vector<Vector>& probes, const std::vector<double>& values) {
  if (!s.exact_cost) return std::numeric_limits<double>::quiet_NaN();
  double e = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) e = std::max(e, std::abs(values[i] - s.exact_cost(probes[i])));
  return e;
}

struct FigureRow {
  std::size_t n, size;
  double sup_error, error_ratio, time_ratio, wall_ms;
};

std::vector<FigureRow> figure_rows(const BuildResult& r) {
  const int d = r.scenario.problem->dim_x();
  std::vector<FigureRow> rows;
  for (const auto& t : r.traces) {
    const double size = double(std::max<std::size_t>(t.size, 2));
    const double err = sup_error(r.scenario, r.probes, t.probes);
    const double rate = std::pow(std::log(size) / size, r.params.rho / d);
    const double work = std::pow(size, r.params.theta) * std::log(size);
    rows.push_back({t.n, t.size, err, err / rate, t.wall_ms / work, t.wall_ms});
  }
  return rows;
}

}  // namespace

int cmd_build(const RunConfig& config, std::ostream& log) {
  config.validate();
  fs::create_directories(config.out_dir);
  for (auto seed : config.seeds) {
    const std::string base = stem(config, seed);
    auto trace = open_out(config.out_dir / (base + ".trace.jsonl"));
    auto timing = open_out(config.out_dir / (base + ".timing.csv"));
    timing << "n,size,wall_ms\n";
    const Scenario scenario = resolve_scenario(config);
    const auto probes = resolve_probes(config, scenario);
    const auto result = build_model(config, seed, [&](const IterationTrace& t, const DiscreteModel&) {
      trace << trace_to_json(t, probes, false).dump() << '\n';
      timing << t.n << ',' << t.size << ',' << t.wall_ms << '\n';
    });
    auto model = open_out(config.out_dir / (base + ".model.json"));
    json m = model_to_json(result.model, result.params);
    m["scenario"] = config.scenario;
    m["scenario_config"] = config.scenario_config;
    model << m.dump() << '\n';
    log << base << ": " << result.model.size() << " states (" << result.model.interior_count() << " interior) after "
        << config.iterations << " iterations\n";
  }
  return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
  config.validate();
  const Scenario scenario = resolve_scenario(config);
  const auto probes = resolve_probes(config, scenario);
  for (auto seed : config.seeds) {
    const std::string base = stem(config, seed);
    const fs::path model_path = config.out_dir / (base + ".model.json");
    std::ifstream in(model_path);
    if (!in) throw UsageError("missing model snapshot " + model_path.string() + "; run build first");
    const DiscreteModel model = model_from_json(json::parse(in));
    const FeedbackPolicy policy(model);

    Vector start = scenario.start;
    if (config.eval.start) {
      start = Eigen::Map<const Eigen::VectorXd>(config.eval.start->data(), Eigen::Index(config.eval.start->size()));
      if (start.size() != scenario.problem->dim_x()) throw UsageError("start has the wrong dimension");
    }
    const double dt = config.eval.dt_sim.value_or(default_dt_sim(*scenario.problem, policy));
    const double t_max = config.eval.t_max.value_or(scenario.t_max);
    const RolloutReport report = evaluate(*scenario.problem, policy, start, config.eval.trials, seed, dt, t_max);

    json j = report_to_json(report, start);
    j["scenario"] = config.scenario;
    j["seed"] = seed;
    j["iteration"] = model.iteration();
    j["dt_sim"] = dt;
    j["t_max"] = t_max;

    if (scenario.exact_cost) {
      auto csv = open_out(config.out_dir / (base + ".errors.csv"));
      const int d = scenario.problem->dim_x();
      for (int k = 0; k < d; ++k) csv << "x" << k + 1 << ',';
      csv << "J,J_exact,abs_error";
      if (scenario.exact_policy) csv << ",mu_error";
      csv << '\n';
      double sup = 0.0;
      for (const auto& z : probes) {
        const double J = model.interpolated_cost(z);
        const double exact = scenario.exact_cost(z);
        sup = std::max(sup, std::abs(J - exact));
        for (int k = 0; k < d; ++k) csv << z[k] << ',';
        csv << J << ',' << exact << ',' << std::abs(J - exact);
        if (scenario.exact_policy) {
          const Vector mu = policy.lookup(z).control;
          csv << ',' << (mu - scenario.exact_policy(z)).norm();
        }
        csv << '\n';
      }
      j["sup_error"] = sup;
    }
    auto out = open_out(config.out_dir / (base + ".report.json"));
    out << j.dump(2) << '\n';
    log << base << ": mean cost " << report.mean << " +- " << report.std_error << " over " << report.trials
        << " trials (goal " << report.counts[0] << ", obstacle " << report.counts[1] << ", outer "
        << report.counts[2] << ", timeout " << report.counts[3] << ")\n";
  }
  return 0;
}

int cmd_figures(const RunConfig& config, std::ostream& log) {
  config.validate();
  fs::create_directories(config.out_dir);
  std::vector<std::vector<FigureRow>> all;
  for (auto seed : config.seeds) {
    const auto result = build_model(config, seed);
    auto rows = figure_rows(result);
    auto csv = open_out(config.out_dir / (stem(config, seed) + ".figures.csv"));
    csv << "n,size,sup_error,error_ratio,time_ratio,wall_ms\n";
    for (const auto& r : rows)
      csv << r.n << ',' << r.size << ',' << r.sup_error << ',' << r.error_ratio << ',' << r.time_ratio << ','
          << r.wall_ms << '\n';
    all.push_back(std::move(rows));
    log << stem(config, seed) << ": figure rows written\n";
  }

  auto csv = open_out(config.out_dir / (config.scenario + ".figures.csv"));
  csv << "n,size_mean,sup_error_mean,sup_error_std,error_ratio_mean,error_ratio_std,time_ratio_mean,time_ratio_std,"
         "seeds\n";
  const std::size_t m = all.size();
  auto stats = [&](std::size_t i, auto field) {
    double s = 0.0, ss = 0.0;
    for (const auto& rows : all) s += field(rows[i]);
    const double mean = s / double(m);
    for (const auto& rows : all) ss += (field(rows[i]) - mean) * (field(rows[i]) - mean);
    return std::pair{mean, m > 1 ? std::sqrt(ss / double(m - 1)) : 0.0};
  };
  for (std::size_t i = 0; i < config.iterations; ++i) {
    const auto size = stats(i, [](const FigureRow& r) { return double(r.size); });
    const auto err = stats(i, [](const FigureRow& r) { return r.sup_error; });
    const auto ratio = stats(i, [](const FigureRow& r) { return r.error_ratio; });
    const auto time = stats(i, [](const FigureRow& r) { return r.time_ratio; });
    csv << all.front()[i].n << ',' << size.first << ',' << err.first << ',' << err.second << ',' << ratio.first
        << ',' << ratio.second << ',' << time.first << ',' << time.second << ',' << m << '\n';
  }
  log << config.scenario << ".figures.csv: " << config.iterations << " rows over " << m << " seeds\n";
  return 0;
}

int cmd_list(std::ostream& out) {
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name);
    out << name << "\t" << s.problem->dim_x() << "D\t" << s.description << '\n';
  }
  return 0;
}

}  // namespace imdp
