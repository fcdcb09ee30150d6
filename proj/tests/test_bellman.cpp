#include <doctest.h>

#include <cmath>
#include <limits>

#include "imdp/bellman.hpp"
#include "imdp/planner.hpp"
#include "imdp/scenarios.hpp"
#include "support.hpp"
#include "tiny_mdp.hpp"

using namespace imdp;
using testing::vec;

TEST_CASE("control count") {
  AlgoParams p;
  CHECK(control_count(1, p) == 4);
  CHECK(control_count(100, p) == 10);
  CHECK(control_count(6000, p) == 18);
}

TEST_CASE("uniform controls stay in U") {
  const ControlProblem problem(testing::single_integrator(2, 0.0, 1.0, 0.1));
  DiscreteModel model(2, 2);
  AlgoParams p;
  RandomStream rng(1);
  const auto c = construct_controls(problem, model, vec({0.5, 0.5}), 5, 0.1, p, rng);
  REQUIRE(c.size() == 5);
  for (const auto& u : c) CHECK(problem.control_box().contains(u));
  const auto with_current = construct_controls(problem, model, vec({0.5, 0.5}), 5, 0.1, p, rng, vec({0.1, 0.2}));
  CHECK(with_current.size() == 6);
  CHECK(with_current.back() == vec({0.1, 0.2}));
}

TEST_CASE("steering controls") {
  const ControlProblem problem(testing::single_integrator(2, -5.0, 5.0, 0.1));
  AlgoParams p;
  p.control_mode = ControlMode::kSteering;
  RandomStream rng(1);

  DiscreteModel model(2, 2);
  model.add_interior_state(vec({0.0, 0.0}), 0.0, vec({0.0, 0.0}), 0.1);
  model.add_interior_state(vec({0.2, 0.0}), 0.0, vec({0.0, 0.0}), 0.1);
  auto c = construct_controls(problem, model, vec({0.0, 0.0}), 1, 0.5, p, rng);
  REQUIRE(c.size() == 1);
  CHECK(c[0][0] == doctest::Approx(0.4));
  CHECK(c[0][1] == doctest::Approx(0.0));

  DiscreteModel far(2, 2);
  far.add_interior_state(vec({0.0, 0.0}), 0.0, vec({0.0, 0.0}), 0.1);
  far.add_interior_state(vec({2.0, 0.0}), 0.0, vec({0.0, 0.0}), 0.1);
  c = construct_controls(problem, far, vec({0.0, 0.0}), 1, 0.5, p, rng);
  CHECK(c[0][0] == doctest::Approx(1.0));
  CHECK(c[0][1] == doctest::Approx(0.0));
}

TEST_CASE("backward extension along a straight line") {
  const ControlProblem problem(testing::single_integrator(2, -1.0, 2.0, 0.1));
  AlgoParams p;
  RandomStream rng(3);
  const auto ext = extend_backwards(problem, vec({1.0, 1.0}), vec({0.0, 0.0}), 1.0, p, rng);
  REQUIRE(ext);
  CHECK(ext->control[0] == doctest::Approx(1.0));
  CHECK(ext->control[1] == doctest::Approx(1.0));
  CHECK(ext->duration == doctest::Approx(1.0));
  CHECK(ext->origin.norm() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ext->path.back() == vec({1.0, 1.0}));
}

TEST_CASE("backward extension toward the state itself") {
  const ControlProblem problem(testing::single_integrator(2, -1.0, 2.0, 0.1));
  AlgoParams p;
  RandomStream rng(3);
  const Vector z = vec({0.5, 0.5});
  const auto ext = extend_backwards(problem, z, z, 1.0, p, rng);
  REQUIRE(ext);
  CHECK(ext->duration == p.min_duration);
  CHECK((ext->origin - z).norm() <= problem.drift(z, ext->control).norm() * p.min_duration + 1e-15);
}

TEST_CASE("backward extension fails when every direction is blocked") {
  auto def = testing::single_integrator(1, 0.0, 1.0, 0.1);
  def.regions.push_back(Region{RegionKind::kObstacle, Box{vec({0.1}), vec({0.4999999})}, 10.0, "left"});
  def.regions.push_back(Region{RegionKind::kObstacle, Box{vec({0.5000001}), vec({0.9})}, 10.0, "right"});
  const ControlProblem problem(def);
  AlgoParams p;
  RandomStream rng(3);
  CHECK_FALSE(extend_backwards(problem, vec({0.5}), vec({0.05}), 1.0, p, rng));
}

TEST_CASE("update from a single deterministic transition") {
  auto def = testing::single_integrator(1, 0.0, 1.0, 0.0);
  def.discount = 0.9;
  const ControlProblem problem(def);
  DiscreteModel model(1, 1);
  const StateId y = model.add_boundary_state(vec({1.0}), 10.0);
  const StateId z = model.add_interior_state(vec({0.5}), std::numeric_limits<double>::infinity(), vec({0.0}), 0.1);
  const std::vector<Vector> controls{vec({0.3})};
  auto to_y = [&](const Vector&, TransitionDistribution& out) {
    out.support = {y};
    out.probs = {1.0};
    return true;
  };
  const auto out = update_with(problem, model, z, controls, 0.1, to_y);
  CHECK(out.improved);
  CHECK(out.new_cost == doctest::Approx(9.99519).epsilon(1e-6));
  CHECK(model.cost(z) == doctest::Approx(9.99519).epsilon(1e-6));
  CHECK(model.control(z)[0] == doctest::Approx(0.3));
  CHECK(model.last_update_size(z) == model.size());

  model.set_cost(z, 0.0);
  const auto same = update_with(problem, model, z, controls, 0.1, to_y);
  CHECK_FALSE(same.improved);
  CHECK(model.cost(z) == 0.0);

  auto none = [](const Vector&, TransitionDistribution&) { return false; };
  CHECK_FALSE(update_with(problem, model, z, controls, 0.1, none).improved);
  CHECK_THROWS_AS(update_with(problem, model, y, controls, 0.1, to_y), std::invalid_argument);
}

TEST_CASE("zero costs stay zero under the incremental build") {
  auto problem = testing::make(testing::single_integrator(2, 0.0, 1.0, 0.1, 0.0, 0.0));
  AlgoParams p;
  p.seed = 4;
  Planner planner(problem, p);
  planner.run(60, [](const IterationTrace&, const DiscreteModel& m) {
    for (double J : m.costs()) REQUIRE(J == 0.0);
  });
}

TEST_CASE("tiny chain: fixed point of the operator") {
  const auto exact = tiny::exact_values();
  const auto op = tiny::op();
  const auto out = op.apply(exact);
  for (int s = 0; s < tiny::kStates; ++s) CHECK(std::abs(out[s] - exact[s]) <= 1e-12);
}

TEST_CASE("tiny chain: asynchronous updates reach the exact values") {
  const auto problem = tiny::problem();
  auto model = tiny::model(1e3);
  tiny::converge(*problem, model);
  const auto exact = tiny::exact_values();
  for (int s = 0; s < tiny::kStates; ++s) CHECK(std::abs(model.cost(s) - exact[s]) <= 1e-6);
}

TEST_CASE("operator contraction and constant invariance") {
  const auto op = tiny::op();
  CHECK(op.modulus() == doctest::Approx(0.9));
  RandomStream rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(tiny::kStates), b(tiny::kStates);
    for (int s = 0; s < tiny::kStates; ++s) {
      a[s] = rng.uniform(-50.0, 50.0);
      b[s] = rng.uniform(-50.0, 50.0);
    }
    const auto ta = op.apply(a), tb = op.apply(b);
    double lhs = 0.0, rhs = 0.0;
    for (int s = 0; s < tiny::kStates; ++s) {
      lhs = std::max(lhs, std::abs(ta[s] - tb[s]));
      rhs = std::max(rhs, std::abs(a[s] - b[s]));
    }
    CHECK(lhs <= op.modulus() * rhs + 1e-12);
  }

  // undiscounted, zero stage cost, absorbing at c
  const double c = 3.25;
  std::vector<BellmanOperator::Action> stay{{0.0, 1.0, {0, 2}, {0.5, 0.5}}};
  const BellmanOperator flat({1, 0, 1}, {c, 0.0, c}, {{}, stay, {}});
  const auto out = flat.apply(std::vector<double>{c, c, c});
  for (double v : out) CHECK(v == c);
  CHECK_THROWS_AS(flat.apply(std::vector<double>{c}), std::invalid_argument);
}

TEST_CASE("operator over a planner snapshot contracts") {
  const auto s = lqr_1d();
  AlgoParams p = s.params;
  p.seed = 2;
  Planner planner(s.problem, p);
  planner.run(150);
  RandomStream rng(9);
  std::vector<Vector> controls;
  for (int i = 0; i < 5; ++i) controls.push_back(vec({rng.uniform(-4.0, 4.0)}));
  const BellmanOperator op(*s.problem, planner.model(), controls, p);
  const double bound = discount_factor(s.problem->discount(), planner.model().min_holding_time());
  CHECK(op.modulus() <= bound + 1e-15);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(op.size()), b(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) {
      a[i] = rng.uniform(0.0, 500.0);
      b[i] = rng.uniform(0.0, 500.0);
    }
    const auto ta = op.apply(a), tb = op.apply(b);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) {
      lhs = std::max(lhs, std::abs(ta[i] - tb[i]));
      rhs = std::max(rhs, std::abs(a[i] - b[i]));
    }
    CHECK(lhs <= bound * rhs + 1e-9);
  }
}
