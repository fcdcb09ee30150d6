#include "imdp/serialization.hpp"

#include <sstream>
#include <stdexcept>

namespace imdp {

using nlohmann::json;

namespace {

json to_array(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector from_array(const json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

json params_to_json(const AlgoParams& p) {
  json j = {
      {"gamma_t", p.gamma_t},
      {"varsigma", p.varsigma},
      {"theta", p.theta},
      {"rho", p.rho},
      {"extension_candidates", p.extension_candidates},
      {"extension_substeps", p.extension_substeps},
      {"min_duration", p.min_duration},
      {"rounds", p.rounds},
      {"controls_factor", p.controls_factor},
      {"controls_min", p.controls_min},
      {"control_mode", to_string(p.control_mode)},
      {"round_robin_fraction", p.round_robin_fraction},
      {"backend", to_string(p.backend)},
      {"moment_tolerance", p.moment_tolerance},
      {"seed", p.seed},
  };
  j["extension_horizon"] = p.extension_horizon ? json(*p.extension_horizon) : json(nullptr);
  j["boundary_fraction_max"] = p.boundary_fraction_max ? json(*p.boundary_fraction_max) : json(nullptr);
  return j;
}

AlgoParams params_from_json(const json& j, AlgoParams p) {
  if (j.is_null()) return p;
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma_t") p.gamma_t = value.get<double>();
    else if (key == "varsigma") p.varsigma = value.get<double>();
    else if (key == "theta") p.theta = value.get<double>();
    else if (key == "rho") p.rho = value.get<double>();
    else if (key == "extension_horizon")
      p.extension_horizon = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
    else if (key == "extension_candidates") p.extension_candidates = value.get<int>();
    else if (key == "extension_substeps") p.extension_substeps = value.get<int>();
    else if (key == "min_duration") p.min_duration = value.get<double>();
    else if (key == "rounds") p.rounds = value.get<int>();
    else if (key == "controls_factor") p.controls_factor = value.get<double>();
    else if (key == "controls_min") p.controls_min = value.get<int>();
    else if (key == "control_mode") p.control_mode = parse_control_mode(value.get<std::string>());
    else if (key == "round_robin_fraction") p.round_robin_fraction = value.get<double>();
    else if (key == "backend") p.backend = parse_backend(value.get<std::string>());
    else if (key == "moment_tolerance") p.moment_tolerance = value.get<double>();
    else if (key == "boundary_fraction_max")
      p.boundary_fraction_max = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else throw std::invalid_argument("unknown parameter: " + key);
  }
  return p;
}

json model_to_json(const DiscreteModel& model, const AlgoParams& params) {
  json states = json::array();
  for (StateId i = 0; i < model.size(); ++i) {
    json s = {{"x", to_array(model.state(i))},
              {"boundary", model.is_boundary(i)},
              {"J", model.cost(i)},
              {"dt", model.holding_time(i)},
              {"kappa", model.last_update_size(i)}};
    s["mu"] = model.is_boundary(i) ? json(nullptr) : to_array(model.control(i));
    states.push_back(std::move(s));
  }
  return {{"iteration", model.iteration()},
          {"dim_x", model.dim_x()},
          {"dim_u", model.dim_u()},
          {"params", params_to_json(params)},
          {"states", std::move(states)}};
}

DiscreteModel model_from_json(const json& j, AlgoParams* params) {
  const int dx = j.at("dim_x").get<int>();
  const int du = j.at("dim_u").get<int>();
  DiscreteModel model(dx, du);
  for (const auto& s : j.at("states")) {
    const Vector x = from_array(s.at("x"));
    if (s.at("boundary").get<bool>()) {
      model.add_boundary_state(x, s.at("J").get<double>());
    } else {
      const Vector mu = from_array(s.at("mu"));
      const StateId id = model.add_interior_state(x, s.at("J").get<double>(), mu, s.at("dt").get<double>());
      model.improve(id, s.at("J").get<double>(), mu, s.at("dt").get<double>(), s.value("kappa", std::size_t{0}));
    }
  }
  model.set_iteration(j.at("iteration").get<std::size_t>());
  if (params) *params = params_from_json(j.at("params"));
  return model;
}

std::string probe_label(const Vector& z) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? "," : "") << z[i];
  return os.str();
}

json trace_to_json(const IterationTrace& t, const std::vector<Vector>& probes, bool with_timing) {
  json p = json::object();
  for (std::size_t i = 0; i < t.probes.size() && i < probes.size(); ++i) p[probe_label(probes[i])] = t.probes[i];
  json j = {{"n", t.n},
            {"size", t.size},
            {"updated", t.updated},
            {"sup_change", t.sup_change},
            {"extended", t.extended},
            {"probes", std::move(p)}};
  if (with_timing) j["wall_ms"] = t.wall_ms;
  return j;
}

json report_to_json(const RolloutReport& r, const Vector& start) {
  return {{"trials", r.trials},
          {"start", to_array(start)},
          {"mean", r.mean},
          {"std_error", r.std_error},
          {"exits",
           {{"goal", r.counts[0]}, {"obstacle", r.counts[1]}, {"outer", r.counts[2]}, {"timeout", r.counts[3]}}},
          {"costs", r.costs},
          {"exit_times", r.exit_times}};
}

}  // namespace imdp
