#include "imdp/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace imdp {
namespace {

Vector uniform_control(const Box& box, RandomStream& rng) {
  Vector u(box.dim());
  for (int k = 0; k < box.dim(); ++k) u[k] = rng.uniform(box.lo[k], box.hi[k]);
  return u;
}

// One RK4 step of dx/ds = -f(x, v).
Vector backward_rk4(const ControlProblem& problem, const Vector& x, const Vector& v, double h) {
  const Vector k1 = -problem.drift(x, v);
  const Vector k2 = -problem.drift(x + 0.5 * h * k1, v);
  const Vector k3 = -problem.drift(x + 0.5 * h * k2, v);
  const Vector k4 = -problem.drift(x + h * k3, v);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::size_t control_count(std::size_t states, const AlgoParams& params) {
  const double ln = states > 1 ? std::log(static_cast<double>(states)) : 0.0;
  const auto c = static_cast<std::size_t>(std::ceil(params.controls_factor * ln));
  return std::max<std::size_t>(static_cast<std::size_t>(params.controls_min), c);
}

std::vector<Vector> construct_controls(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                                       std::size_t count, double tau, const AlgoParams& params, RandomStream& rng,
                                       const std::optional<Vector>& current) {
  if (count == 0) throw std::invalid_argument("control count must be positive");
  std::vector<Vector> controls;
  controls.reserve(count + 1);
  if (params.control_mode == ControlMode::kSteering && problem.has_steering() && model.size() > 0) {
    // Skip z itself; ask for one extra neighbour to make up for it.
    const auto nn = model.all_index().nearest(z, count + 1);
    for (const auto& n : nn) {
      if (controls.size() == count) break;
      if (n.distance <= 0.0) continue;
      if (auto v = problem.steer(z, model.state(n.id), tau)) controls.push_back(problem.clip_control(*v));
    }
  }
  while (controls.size() < count) controls.push_back(uniform_control(problem.control_box(), rng));
  if (current && current->size() == problem.dim_u() && current->allFinite()) controls.push_back(*current);
  return controls;
}

std::optional<Extension> extend_backwards(const ControlProblem& problem, const Vector& z, const Vector& target,
                                          double horizon, const AlgoParams& params, RandomStream& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("extension horizon must be positive");
  std::vector<Vector> candidates;
  candidates.reserve(static_cast<std::size_t>(params.extension_candidates));
  if (auto v = problem.steer(target, z, horizon)) candidates.push_back(problem.clip_control(*v));
  while (candidates.size() < static_cast<std::size_t>(params.extension_candidates))
    candidates.push_back(uniform_control(problem.control_box(), rng));

  if ((target - z).norm() <= 1e-12 * problem.diameter()) {
    for (const auto& v : candidates) {
      const Vector x0 = z - problem.drift(z, v) * params.min_duration;
      if (problem.in_interior(x0)) return Extension{x0, v, params.min_duration, {x0, z}};
    }
    return std::nullopt;
  }

  const int substeps = params.extension_substeps;
  const double h = horizon / substeps;
  double best = std::numeric_limits<double>::infinity();
  int best_candidate = -1;
  int best_step = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Vector x = z;
    for (int k = 1; k <= substeps; ++k) {
      x = backward_rk4(problem, x, candidates[c], h);
      if (!x.allFinite() || !problem.in_interior(x)) break;
      const double d = (x - target).norm();
      if (d < best) {
        best = d;
        best_candidate = static_cast<int>(c);
        best_step = k;
      }
    }
  }
  if (best_candidate < 0) return std::nullopt;

  const Vector& v = candidates[static_cast<std::size_t>(best_candidate)];
  std::vector<Vector> path(static_cast<std::size_t>(best_step) + 1);
  path.back() = z;
  Vector x = z;
  for (int k = best_step - 1; k >= 0; --k) {
    x = backward_rk4(problem, x, v, h);
    path[static_cast<std::size_t>(k)] = x;
  }
  return Extension{path.front(), v, best_step * h, std::move(path)};
}

double backup_value(double tau, double running_cost, double alpha, const TransitionDistribution& t,
                    std::span<const double> values) {
  double expected = 0.0;
  for (std::size_t j = 0; j < t.support.size(); ++j) expected += t.probs[j] * values[t.support[j]];
  return tau * running_cost + discount_factor(alpha, tau) * expected;
}

UpdateOutcome update_with(const ControlProblem& problem, DiscreteModel& model, StateId id,
                          std::span<const Vector> controls, double tau, const TransitionFn& transition) {
  if (model.is_boundary(id)) throw std::invalid_argument("update needs an interior state");
  const Vector z = model.state(id);
  const auto& values = model.costs();
  UpdateOutcome out;
  out.new_cost = model.cost(id);
  out.holding_time = tau;
  double best = std::numeric_limits<double>::infinity();
  thread_local TransitionDistribution t;
  for (const auto& v : controls) {
    if (!transition(v, t)) continue;
    const double candidate = backup_value(tau, problem.cost_rate(z, v), problem.discount(), t, values);
    if (candidate < best) {
      best = candidate;
      out.control = v;
      out.support_size = t.support.size();
    }
  }
  if (best < model.cost(id)) {
    out.improved = true;
    out.new_cost = best;
    model.improve(id, best, out.control, tau, model.size());
  }
  return out;
}

UpdateOutcome update(const ControlProblem& problem, DiscreteModel& model, StateId id, const AlgoParams& params,
                     RandomStream& rng) {
  const std::size_t states = std::max<std::size_t>(model.size(), 2);
  const double tau = compute_holding_time(states, params, problem.dim_x());
  const Vector z = model.state(id);
  const auto controls = construct_controls(problem, model, z, control_count(states, params), tau, params, rng,
                                           model.control(id));
  return update_with(problem, model, id, controls, tau, [&](const Vector& v, TransitionDistribution& t) {
    compute_transition(problem, model, z, v, tau, params, t);
    return true;
  });
}

BellmanOperator::BellmanOperator(std::vector<char> boundary, std::vector<double> terminal,
                                 std::vector<std::vector<Action>> actions)
    : boundary_(std::move(boundary)), terminal_(std::move(terminal)), actions_(std::move(actions)) {
  if (terminal_.size() != boundary_.size() || actions_.size() != boundary_.size())
    throw std::invalid_argument("operator tables disagree in size");
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    if (!boundary_[i] && actions_[i].empty()) throw std::invalid_argument("interior state without actions");
  }
}

BellmanOperator::BellmanOperator(const ControlProblem& problem, const DiscreteModel& model,
                                 std::span<const Vector> controls, const AlgoParams& params) {
  const std::size_t n = model.size();
  boundary_.resize(n);
  terminal_.resize(n);
  actions_.resize(n);
  for (StateId i = 0; i < n; ++i) {
    boundary_[i] = model.is_boundary(i) ? 1 : 0;
    terminal_[i] = model.cost(i);
    if (boundary_[i]) continue;
    const Vector z = model.state(i);
    const double tau = model.holding_time(i);
    for (const auto& v : controls) {
      auto t = compute_transition(problem, model, z, v, tau, params);
      actions_[i].push_back(Action{tau * problem.cost_rate(z, v), discount_factor(problem.discount(), tau),
                                   std::move(t.support), std::move(t.probs)});
    }
  }
}

std::vector<double> BellmanOperator::apply(std::span<const double> values) const {
  if (values.size() != size()) throw std::invalid_argument("value vector has the wrong size");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (boundary_[i]) {
      out[i] = terminal_[i];
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : actions_[i]) {
      double e = 0.0;
      for (std::size_t j = 0; j < a.support.size(); ++j) e += a.probs[j] * values[a.support[j]];
      best = std::min(best, a.stage_cost + a.discount * e);
    }
    out[i] = best;
  }
  return out;
}

double BellmanOperator::modulus() const {
  double m = 0.0;
  for (const auto& row : actions_)
    for (const auto& a : row) m = std::max(m, a.discount);
  return m;
}

}  // namespace imdp
