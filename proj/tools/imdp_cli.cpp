#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "imdp/experiment.hpp"

using nlohmann::json;

namespace {

struct Flags {
  std::string config_file;
  std::optional<std::string> scenario;
  std::optional<long long> iters;
  std::optional<std::string> seeds;
  std::optional<std::string> out;
  std::optional<std::string> backend;
  std::optional<double> theta;
  std::optional<double> varsigma;
  std::optional<double> gamma_t;
  std::optional<int> rounds;
  std::optional<long long> trials;
  std::optional<int> probes;
  std::optional<double> dt_sim;
  std::optional<double> t_max;
  std::optional<std::string> scenario_json;
};

void add_common(CLI::App* cmd, Flags& f, bool eval_flags) {
  cmd->add_option("--config", f.config_file, "JSON run config; flags override it");
  cmd->add_option("--scenario", f.scenario, "scenario name (see list-scenarios)");
  cmd->add_option("--iters", f.iters, "iteration budget N");
  cmd->add_option("--seed,--seeds", f.seeds, "seed list, e.g. 7 or 0-19 or 1,4,9");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--backend", f.backend, "transition backend: consistent | gaussian");
  cmd->add_option("--theta", f.theta, "update-set exponent theta");
  cmd->add_option("--sigma-t", f.varsigma, "holding-time exponent factor varsigma");
  cmd->add_option("--gamma-t", f.gamma_t, "holding-time scale gamma_t");
  cmd->add_option("--rounds", f.rounds, "value-iteration rounds per iteration");
  cmd->add_option("--probes", f.probes, "probe grid size (1D scenarios)");
  cmd->add_option("--scenario-config", f.scenario_json, "scenario overrides as inline JSON");
  if (eval_flags) {
    cmd->add_option("--trials", f.trials, "Monte-Carlo rollouts");
    cmd->add_option("--dt-sim", f.dt_sim, "simulation step");
    cmd->add_option("--t-max", f.t_max, "rollout horizon");
  }
}

imdp::RunConfig make_config(const Flags& f) {
  imdp::RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw imdp::UsageError("cannot read config " + f.config_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw imdp::UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    c = imdp::config_from_json(j);
  }
  if (f.scenario) c.scenario = *f.scenario;
  if (f.iters) {
    if (*f.iters < 1) throw imdp::UsageError("--iters must be >= 1");
    c.iterations = static_cast<std::size_t>(*f.iters);
  }
  if (f.seeds) c.seeds = imdp::parse_seed_list(*f.seeds);
  if (f.out) c.out_dir = *f.out;
  if (f.probes) c.probes = *f.probes;
  if (f.scenario_json) {
    try {
      c.scenario_config = json::parse(*f.scenario_json);
    } catch (const json::exception& e) {
      throw imdp::UsageError(std::string("--scenario-config is not valid JSON: ") + e.what());
    }
  }
  if (!c.params.is_object()) c.params = json::object();
  if (f.backend) c.params["backend"] = *f.backend;
  if (f.theta) c.params["theta"] = *f.theta;
  if (f.varsigma) c.params["varsigma"] = *f.varsigma;
  if (f.gamma_t) c.params["gamma_t"] = *f.gamma_t;
  if (f.rounds) c.params["rounds"] = *f.rounds;
  if (f.trials) {
    if (*f.trials < 1) throw imdp::UsageError("--trials must be >= 1");
    c.eval.trials = static_cast<std::size_t>(*f.trials);
  }
  if (f.dt_sim) c.eval.dt_sim = *f.dt_sim;
  if (f.t_max) c.eval.t_max = *f.t_max;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental MDP builder for continuous-time stochastic optimal control"};
  app.require_subcommand(1);
  Flags build_flags, eval_flags, fig_flags;
  auto* build = app.add_subcommand("build", "build models and stream traces");
  add_common(build, build_flags, false);
  auto* eval = app.add_subcommand("eval", "evaluate saved models by Monte-Carlo rollouts");
  add_common(eval, eval_flags, true);
  auto* figures = app.add_subcommand("figures", "write convergence, rate and timing tables");
  add_common(figures, fig_flags, false);
  auto* list = app.add_subcommand("list-scenarios", "print the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*list) return imdp::cmd_list(std::cout);
    if (*build) return imdp::cmd_build(make_config(build_flags), std::cerr);
    if (*eval) return imdp::cmd_eval(make_config(eval_flags), std::cerr);
    if (*figures) return imdp::cmd_figures(make_config(fig_flags), std::cerr);
  } catch (const imdp::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
