#include "imdp/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imdp {

using nlohmann::json;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector vec_from(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Box rect(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("rectangles are [x0, y0, x1, y1]");
  return Box{vec({j[0].get<double>(), j[1].get<double>()}), vec({j[2].get<double>(), j[3].get<double>()})};
}

void check_keys(const json& config, std::initializer_list<const char*> allowed, const std::string& scenario) {
  if (config.is_null()) return;
  if (!config.is_object()) throw std::invalid_argument(scenario + ": scenario config must be an object");
  for (const auto& [key, _] : config.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument(scenario + ": unknown scenario key '" + key + "'");
  }
}

template <class T>
T get_or(const json& config, const char* key, T fallback) {
  if (config.is_object() && config.contains(key)) return config.at(key).get<T>();
  return fallback;
}

struct PlanarLayout {
  Box box;
  Box goal;
  std::vector<Box> obstacles;
  Vector start;
  double sigma;
  double goal_cost = -1.0;
  double obstacle_cost = 10.0;
  double outer_cost = 10.0;
};

PlanarLayout read_layout(PlanarLayout layout, const json& config, const std::string& name) {
  check_keys(config, {"sigma", "obstacles", "goal", "obstacle_cost", "goal_cost", "outer_cost", "start", "box"}, name);
  if (config.is_null()) return layout;
  layout.sigma = get_or(config, "sigma", layout.sigma);
  layout.goal_cost = get_or(config, "goal_cost", layout.goal_cost);
  layout.obstacle_cost = get_or(config, "obstacle_cost", layout.obstacle_cost);
  layout.outer_cost = get_or(config, "outer_cost", layout.outer_cost);
  if (config.contains("box")) layout.box = rect(config["box"]);
  if (config.contains("goal")) layout.goal = rect(config["goal"]);
  if (config.contains("start")) layout.start = vec_from(config["start"]);
  if (config.contains("obstacles")) {
    layout.obstacles.clear();
    for (const auto& r : config["obstacles"]) layout.obstacles.push_back(rect(r));
  }
  if (layout.sigma < 0.0) throw std::invalid_argument(name + ": sigma must be nonnegative");
  return layout;
}

Scenario planar_integrator(const std::string& name, const std::string& description, const PlanarLayout& layout) {
  ControlProblem::Definition def;
  def.dim_x = 2;
  def.dim_u = 2;
  def.dim_w = 2;
  const double sigma = layout.sigma;
  def.drift = [](const Vector&, const Vector& u) { return u; };
  def.diffusion = [sigma](const Vector&, const Vector&) { return Matrix(sigma * Matrix::Identity(2, 2)); };
  def.cost_rate = [](const Vector&, const Vector&) { return 0.0; };
  const double outer = layout.outer_cost;
  def.outer_terminal_cost = [outer](const Vector&) { return outer; };
  def.state_box = layout.box;
  def.control_box = Box{vec({-1.0, -1.0}), vec({1.0, 1.0})};
  def.discount = 0.95;
  def.holder_exponent = 0.5;
  def.steer = [](const Vector& from, const Vector& to, double duration) -> std::optional<Vector> {
    return Vector((to - from) / duration);
  };
  def.regions.push_back(Region{RegionKind::kGoal, layout.goal, layout.goal_cost, "goal"});
  for (std::size_t i = 0; i < layout.obstacles.size(); ++i)
    def.regions.push_back(Region{RegionKind::kObstacle, layout.obstacles[i], layout.obstacle_cost,
                                 "obstacle" + std::to_string(i)});

  Scenario s;
  s.name = name;
  s.description = description;
  s.problem = std::make_shared<const ControlProblem>(std::move(def));
  if (!s.problem->in_interior(layout.start)) throw std::invalid_argument(name + ": start must lie in the interior");
  s.start = layout.start;
  s.probes = {layout.start};
  s.params.theta = 0.5;
  s.params.varsigma = 0.99;
  s.params.rho = 0.5;
  s.params.gamma_t = 1.0;
  s.t_max = 100.0;
  return s;
}

}  // namespace

std::vector<Vector> grid_1d(double lo, double hi, int count) {
  std::vector<Vector> g;
  for (int i = 0; i < count; ++i) g.push_back(vec({lo + (hi - lo) * i / (count - 1)}));
  return g;
}

Scenario lqr_1d(const json& config) {
  check_keys(config, {"gamma_t", "rounds", "control_bound"}, "lqr1d");
  const double bound = get_or(config, "control_bound", 4.0);
  ControlProblem::Definition def;
  def.dim_x = 1;
  def.dim_u = 1;
  def.dim_w = 1;
  def.drift = [](const Vector& x, const Vector& u) { return Vector(3.0 * x + 11.0 * u); };
  def.diffusion = [](const Vector&, const Vector&) { return Matrix(Matrix::Constant(1, 1, std::sqrt(0.2))); };
  def.cost_rate = [](const Vector& x, const Vector& u) { return 3.5 * x[0] * x[0] + 200.0 * u[0] * u[0]; };
  def.outer_terminal_cost = [](const Vector&) { return 414.55; };
  def.state_box = Box{vec({-6.0}), vec({6.0})};
  def.control_box = Box{vec({-bound}), vec({bound})};
  def.discount = 0.95;
  def.holder_exponent = 0.5;
  // Constant u moving x0 to x1 in time T: x1 = e^{3T} x0 + 11u (e^{3T} - 1) / 3.
  def.steer = [](const Vector& from, const Vector& to, double duration) -> std::optional<Vector> {
    const double e = std::exp(3.0 * duration);
    return vec({3.0 * (to[0] - e * from[0]) / (11.0 * (e - 1.0))});
  };

  Scenario s;
  s.name = "lqr1d";
  s.description = "1D linear-quadratic regulator with analytic cost-to-go";
  s.problem = std::make_shared<const ControlProblem>(std::move(def));
  s.params.theta = 0.5;
  s.params.varsigma = 0.99;
  s.params.rho = 0.5;
  s.params.gamma_t = get_or(config, "gamma_t", 0.25);
  s.params.rounds = static_cast<int>(get_or(config, "rounds", 6.0));
  s.probes = grid_1d(-6.0, 6.0, 21);
  s.start = vec({0.0});
  s.t_max = 200.0;
  s.exact_cost = [](const Vector& z) { return 10.39 * z[0] * z[0] + 40.51; };
  s.exact_policy = [](const Vector& z) { return vec({-0.5714 * z[0]}); };
  return s;
}

Scenario integrator_2d_cluttered(const json& config) {
  PlanarLayout layout;
  layout.box = Box{vec({0.0, 0.0}), vec({10.0, 10.0})};
  layout.goal = Box{vec({8.5, 8.5}), vec({9.5, 9.5})};
  layout.obstacles = {
      Box{vec({2.0, 1.5}), vec({3.5, 4.5})},  Box{vec({5.0, 0.0}), vec({6.0, 3.5})},
      Box{vec({1.0, 6.0}), vec({4.0, 7.0})},  Box{vec({4.5, 4.5}), vec({6.5, 6.0})},
      Box{vec({7.5, 3.0}), vec({9.0, 4.5})},  Box{vec({6.5, 7.5}), vec({7.5, 10.0})},
  };
  layout.start = vec({1.0, 1.0});
  layout.sigma = 0.26;
  layout = read_layout(layout, config, "cluttered2d");
  return planar_integrator("cluttered2d", "2D single integrator in a cluttered room, goal upper right", layout);
}

Scenario corridor_2d(const json& config) {
  PlanarLayout layout;
  layout.box = Box{vec({-6.0, -6.0}), vec({6.0, 6.0})};
  layout.goal = Box{vec({-0.5, 4.5}), vec({0.5, 5.5})};
  layout.obstacles = {
      Box{vec({-4.5, -1.5}), vec({-0.4, 1.5})},
      Box{vec({0.4, -1.5}), vec({4.5, 1.5})},
  };
  layout.start = vec({0.0, -5.0});
  layout.sigma = 0.37;
  layout = read_layout(layout, config, "corridor2d");
  return planar_integrator("corridor2d", "2D single integrator choosing a narrow corridor or a detour", layout);
}

Scenario manipulator_6d(const json& config) {
  check_keys(config, {"sigma", "goal_radius", "outer_cost", "control_bound"}, "manipulator6d");
  const double sigma = get_or(config, "sigma", 0.032);
  const double radius = get_or(config, "goal_radius", 0.1);
  const double outer = get_or(config, "outer_cost", 100.0);
  const double bound = get_or(config, "control_bound", 0.3);
  constexpr int d = 6;
  ControlProblem::Definition def;
  def.dim_x = d;
  def.dim_u = d;
  def.dim_w = d;
  def.drift = [](const Vector&, const Vector& u) { return u; };
  def.diffusion = [sigma](const Vector&, const Vector&) { return Matrix(sigma * Matrix::Identity(d, d)); };
  def.cost_rate = [](const Vector&, const Vector&) { return 1.0; };
  def.outer_terminal_cost = [outer](const Vector&) { return outer; };
  def.state_box = Box{Vector::Zero(d), Vector::Constant(d, std::numbers::pi)};
  def.control_box = Box{Vector::Constant(d, -bound), Vector::Constant(d, bound)};
  def.discount = 0.95;
  def.holder_exponent = 0.5;
  def.steer = [](const Vector& from, const Vector& to, double duration) -> std::optional<Vector> {
    return Vector((to - from) / duration);
  };
  def.regions.push_back(
      Region{RegionKind::kGoal, Ball{Vector::Constant(d, std::numbers::pi / 2), radius}, 0.0, "upright"});

  Scenario s;
  s.name = "manipulator6d";
  s.description = "6-joint arm as a single integrator reaching the upright pose in minimum time";
  s.problem = std::make_shared<const ControlProblem>(std::move(def));
  s.start = Vector::Constant(d, 1.0);
  s.probes = {s.start};
  s.params.theta = 0.5;
  s.params.varsigma = 0.99;
  s.params.rho = 0.5;
  s.params.gamma_t = 1.0;
  s.t_max = 100.0;
  return s;
}

std::vector<std::string> scenario_names() { return {"lqr1d", "cluttered2d", "corridor2d", "manipulator6d"}; }

Scenario make_scenario(const std::string& name, const json& config) {
  if (name == "lqr1d") return lqr_1d(config);
  if (name == "cluttered2d") return integrator_2d_cluttered(config);
  if (name == "corridor2d") return corridor_2d(config);
  if (name == "manipulator6d") return manipulator_6d(config);
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace imdp
