#include <doctest.h>

#include <cmath>
#include <sstream>

#include "imdp/policy.hpp"
#include "support.hpp"

using namespace imdp;
using testing::vec;

namespace {

ControlProblem drifting(double f, double g, double h) {
  auto def = testing::single_integrator(1, -6.0, 6.0, 0.0, g, h);
  def.drift = [f](const Vector&, const Vector&) { return vec({f}); };
  def.diffusion = [](const Vector&, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  return ControlProblem(def);
}

DiscreteModel one_state(double x, double u, double dt = 1.0) {
  DiscreteModel m(1, 1);
  m.add_interior_state(vec({x}), 0.0, vec({u}), dt);
  return m;
}

}  // namespace

TEST_CASE("policy lookup") {
  DiscreteModel empty(1, 1);
  empty.add_boundary_state(vec({6.0}), 1.0);
  CHECK_THROWS_WITH(FeedbackPolicy(empty).lookup(vec({0.0})), "empty policy");

  const FeedbackPolicy single(one_state(2.0, 0.7));
  CHECK(single.lookup(vec({-5.0})).control[0] == 0.7);
  CHECK(single.lookup(vec({5.0})).control[0] == 0.7);

  DiscreteModel two(1, 1);
  two.add_interior_state(vec({0.0}), 0.0, vec({-1.0}), 0.5);
  two.add_interior_state(vec({1.0}), 0.0, vec({1.0}), 0.25);
  const FeedbackPolicy policy(two);
  CHECK(policy.lookup(vec({0.4})).control[0] == -1.0);
  CHECK(policy.lookup(vec({1.0})).control[0] == 1.0);
  CHECK(policy.lookup(vec({1.0})).duration == 0.25);
  CHECK(policy.min_holding_time() == 0.25);
}

TEST_CASE("null dynamics time out at zero cost") {
  const ControlProblem p = drifting(0.0, 0.0, 0.0);
  const FeedbackPolicy policy(one_state(0.0, 0.0));
  RandomStream rng(1);
  const auto r = simulate_rollout(p, policy, vec({1.5}), rng, 0.1, 5.0, true);
  CHECK(r.exit == ExitClass::kTimeout);
  CHECK(r.cost == 0.0);
  for (const auto& x : r.states) CHECK(x[0] == 1.5);
}

TEST_CASE("unit drift exits at the upper end") {
  const ControlProblem p = drifting(1.0, 0.0, 0.0);
  const FeedbackPolicy policy(one_state(0.0, 0.0));
  RandomStream rng(1);
  const auto r = simulate_rollout(p, policy, vec({0.0}), rng, 0.1, 100.0, true);
  CHECK(r.exit == ExitClass::kOuter);
  CHECK(std::abs(r.states.back()[0] - 6.0) <= p.boundary_tolerance());
  CHECK(std::abs(r.exit_time - 6.0) <= 0.1);
}

TEST_CASE("discounted running cost up to a deterministic exit") {
  const ControlProblem p = drifting(1.0, 1.0, 0.0);
  const FeedbackPolicy policy(one_state(0.0, 0.0));
  RandomStream rng(1);
  const double dt = 0.01;
  const auto r = simulate_rollout(p, policy, vec({0.0}), rng, dt, 100.0);
  const double exact = (1.0 - std::pow(0.95, r.exit_time)) / -std::log(0.95);
  CHECK(std::abs(r.cost - exact) <= 2.0 * dt * exact);
}

TEST_CASE("a start on the boundary pays the terminal cost at once") {
  const ControlProblem p = drifting(1.0, 1.0, 7.0);
  const FeedbackPolicy policy(one_state(0.0, 0.0));
  RandomStream rng(1);
  const auto r = simulate_rollout(p, policy, vec({6.0}), rng, 0.1, 10.0);
  CHECK(r.cost == 7.0);
  CHECK(r.exit_time == 0.0);
}

TEST_CASE("evaluation is deterministic") {
  const ControlProblem still = drifting(1.0, 1.0, 2.0);
  const FeedbackPolicy policy(one_state(0.0, 0.0));
  const auto a = evaluate(still, policy, vec({0.0}), 50, 3, 0.05, 100.0);
  CHECK(a.std_error == 0.0);
  for (double c : a.costs) CHECK(c == a.costs.front());

  auto def = testing::single_integrator(1, -6.0, 6.0, 0.8, 1.0, 2.0);
  const ControlProblem noisy(def);
  const auto b1 = evaluate(noisy, policy, vec({0.0}), 2000, 5, 0.05, 200.0);
  const auto b2 = evaluate(noisy, policy, vec({0.0}), 2000, 5, 0.05, 200.0);
  CHECK(b1.mean == b2.mean);
  CHECK(b1.std_error > 0.0);
  CHECK(b1.counts[0] + b1.counts[1] + b1.counts[2] + b1.counts[3] == 2000);
  CHECK(b1.counts[0] == 0);
  CHECK(b1.counts[1] == 0);
  CHECK(b1.fraction(ExitClass::kOuter) > 0.9);
}

TEST_CASE("trajectory csv") {
  const ControlProblem p = drifting(1.0, 0.0, 0.0);
  const FeedbackPolicy policy(one_state(0.0, 0.5));
  RandomStream rng(1);
  const auto r = simulate_rollout(p, policy, vec({5.0}), rng, 0.25, 10.0, true);
  std::ostringstream os;
  write_trajectory_csv(os, r);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x1,u1\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.states.size() + 1);
}
