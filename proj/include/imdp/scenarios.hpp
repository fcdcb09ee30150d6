#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imdp/params.hpp"
#include "imdp/problem.hpp"

namespace imdp {

struct Scenario {
  std::string name;
  std::string description;
  std::shared_ptr<const ControlProblem> problem;
  AlgoParams params;
  std::vector<Vector> probes;
  Vector start;
  double t_max = 100.0;
  std::function<double(const Vector&)> exact_cost;   // empty when unknown
  std::function<Vector(const Vector&)> exact_policy;  // empty when unknown
};

/// dx = (3x + 11u) dt + sqrt(0.2) dw on [-6, 6], cost 3.5x^2 + 200u^2,
/// alpha = 0.95, h = 414.55. Exact J*(z) = 10.39 z^2 + 40.51, mu*(z) = -0.5714 z.
Scenario lqr_1d(const nlohmann::json& config = {});

/// 2D single integrator among rectangles, goal in the upper right corner.
/// Keys: sigma, obstacles [[x0,y0,x1,y1],...], goal [x0,y0,x1,y1],
/// obstacle_cost, goal_cost, outer_cost, start [x,y], box [x0,y0,x1,y1].
Scenario integrator_2d_cluttered(const nlohmann::json& config = {});

/// 2D single integrator that either threads a narrow corridor or detours
/// around two blocks. Same keys as the cluttered scenario; sigma 0.37 by
/// default.
Scenario corridor_2d(const nlohmann::json& config = {});

/// Six joints driven as a single integrator toward the upright pose in
/// minimum time. Keys: sigma, goal_radius, outer_cost, control_bound.
Scenario manipulator_6d(const nlohmann::json& config = {});

std::vector<std::string> scenario_names();
/// Throws std::invalid_argument for an unknown name.
Scenario make_scenario(const std::string& name, const nlohmann::json& config = {});

/// Evenly spaced points lo, lo + h, ..., hi.
std::vector<Vector> grid_1d(double lo, double hi, int count);

}  // namespace imdp
