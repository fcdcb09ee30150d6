#include <memory>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "imdp/planner.hpp"
#include "imdp/policy.hpp"
#include "imdp/scenarios.hpp"
#include "imdp/serialization.hpp"

namespace py = pybind11;
using nlohmann::json;
using imdp::Scenario;

namespace {

json parse_or_null(const std::string& text) { return text.empty() ? json() : json::parse(text); }

struct PyPolicy {
  Scenario scenario;
  std::shared_ptr<imdp::FeedbackPolicy> policy;

  py::tuple lookup(const imdp::Vector& z) const {
    const auto l = policy->lookup(z);
    return py::make_tuple(l.control, l.duration);
  }

  std::string evaluate(std::optional<imdp::Vector> start, std::size_t trials, std::uint64_t seed,
                       std::optional<double> dt_sim, std::optional<double> t_max) const {
    const imdp::Vector z0 = start.value_or(scenario.start);
    const double dt = dt_sim.value_or(imdp::default_dt_sim(*scenario.problem, *policy));
    imdp::RolloutReport report;
    {
      py::gil_scoped_release release;
      report = imdp::evaluate(*scenario.problem, *policy, z0, trials, seed, dt, t_max.value_or(scenario.t_max));
    }
    json j = imdp::report_to_json(report, z0);
    j["dt_sim"] = dt;
    return j.dump();
  }
};

struct PyPlanner {
  Scenario scenario;
  std::unique_ptr<imdp::Planner> planner;

  PyPlanner(const std::string& name, std::uint64_t seed, const std::string& config, const std::string& params)
      : scenario(imdp::make_scenario(name, parse_or_null(config))) {
    imdp::AlgoParams p = scenario.params;
    if (!params.empty()) p = imdp::params_from_json(json::parse(params), p);
    p.seed = seed;
    planner = std::make_unique<imdp::Planner>(scenario.problem, p, scenario.probes);
  }

  std::string run(std::size_t iterations) {
    std::vector<imdp::IterationTrace> traces;
    {
      py::gil_scoped_release release;
      traces = planner->run(iterations);
    }
    json out = json::array();
    for (const auto& t : traces) out.push_back(imdp::trace_to_json(t, scenario.probes));
    return out.dump();
  }

  Eigen::MatrixXd states() const {
    const auto& m = planner->model();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m.size()), m.dim_x());
    for (imdp::StateId i = 0; i < m.size(); ++i) X.row(i) = m.state(i).transpose();
    return X;
  }

  std::vector<double> costs() const { return planner->model().costs(); }

  std::vector<bool> boundary() const {
    const auto& m = planner->model();
    std::vector<bool> b(m.size());
    for (imdp::StateId i = 0; i < m.size(); ++i) b[i] = m.is_boundary(i);
    return b;
  }

  std::string snapshot() const { return imdp::model_to_json(planner->model(), planner->params()).dump(); }

  PyPolicy policy() const { return {scenario, std::make_shared<imdp::FeedbackPolicy>(planner->model())}; }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Incremental Markov decision process planner";
  m.def("scenario_names", &imdp::scenario_names);
  m.def(
      "exact_cost",
      [](const std::string& name, const imdp::Vector& z) -> std::optional<double> {
        const auto s = imdp::make_scenario(name);
        if (!s.exact_cost) return std::nullopt;
        return s.exact_cost(z);
      },
      py::arg("scenario"), py::arg("z"));

  py::class_<PyPolicy>(m, "Policy")
      .def("lookup", &PyPolicy::lookup, py::arg("z"))
      .def("_evaluate", &PyPolicy::evaluate, py::arg("start"), py::arg("trials"), py::arg("seed"), py::arg("dt_sim"),
           py::arg("t_max"))
      .def_property_readonly("size", [](const PyPolicy& p) { return p.policy->size(); });

  py::class_<PyPlanner>(m, "_Planner")
      .def(py::init<const std::string&, std::uint64_t, const std::string&, const std::string&>(),
           py::arg("scenario"), py::arg("seed"), py::arg("config"), py::arg("params"))
      .def("_run", &PyPlanner::run, py::arg("iterations"))
      .def("states", &PyPlanner::states)
      .def("costs", &PyPlanner::costs)
      .def("boundary", &PyPlanner::boundary)
      .def("_snapshot", &PyPlanner::snapshot)
      .def("policy", &PyPlanner::policy)
      .def_property_readonly("iteration", [](const PyPlanner& p) { return p.planner->iteration(); })
      .def_property_readonly("size", [](const PyPlanner& p) { return p.planner->model().size(); })
      .def_property_readonly("probes", [](const PyPlanner& p) { return p.scenario.probes; });
}
