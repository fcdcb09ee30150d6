#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "imdp/chain.hpp"
#include "imdp/planner.hpp"
#include "imdp/scenarios.hpp"

namespace imdp {

/// Bad command-line or config input; the CLI maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EvalSettings {
  std::size_t trials = 2000;
  std::optional<double> dt_sim;
  std::optional<double> t_max;
  std::optional<std::vector<double>> start;
};

struct RunConfig {
  std::string scenario = "lqr1d";
  nlohmann::json scenario_config = nullptr;
  nlohmann::json params = nullptr;  // AlgoParams overrides
  std::size_t iterations = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out_dir = ".";
  EvalSettings eval;
  // Probe grid size for 1D scenarios; the scenario's own probes otherwise.
  std::optional<int> probes;

  /// Throws UsageError.
  void validate() const;
};

/// Reads {scenario, scenario_config, params, iterations, seeds, out, eval:
/// {trials, dt_sim, t_max, start}, probes}. Missing keys keep `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Comma list of seeds and ranges, e.g. "0,3,10-19".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

struct BuildResult {
  Scenario scenario;
  AlgoParams params;
  std::vector<Vector> probes;
  DiscreteModel model;
  std::vector<IterationTrace> traces;
};

/// Scenario with config applied, its params with overrides and seed, and
/// the probe set.
Scenario resolve_scenario(const RunConfig& config);
AlgoParams resolve_params(const RunConfig& config, const Scenario& scenario, std::uint64_t seed);
std::vector<Vector> resolve_probes(const RunConfig& config, const Scenario& scenario);

BuildResult build_model(const RunConfig& config, std::uint64_t seed, const Planner::Callback& callback = {});

std::string stem(const RunConfig& config, std::uint64_t seed);

int cmd_build(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_figures(const RunConfig& config, std::ostream& log);
int cmd_list(std::ostream& out);

}  // namespace imdp
