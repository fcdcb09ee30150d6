#include "imdp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace imdp {

FeedbackPolicy::FeedbackPolicy(const DiscreteModel& model) : dim_x_(model.dim_x()), index_(model.dim_x()) {
  const auto& ids = model.interior_ids();
  states_.reserve(ids.size());
  for (StateId id : ids) {
    const auto slot = static_cast<StateId>(states_.size());
    states_.push_back(model.state(id));
    controls_.push_back(model.control(id));
    durations_.push_back(model.holding_time(id));
    index_.insert(slot, states_.back());
  }
}

FeedbackPolicy::Lookup FeedbackPolicy::lookup(const Vector& z) const {
  if (states_.empty()) throw std::runtime_error("empty policy");
  const auto nn = index_.nearest(z, 1);
  const StateId i = nn.front().id;
  return {controls_[i], durations_[i], i};
}

double FeedbackPolicy::min_holding_time() const {
  if (durations_.empty()) throw std::runtime_error("empty policy");
  return *std::min_element(durations_.begin(), durations_.end());
}

std::string to_string(ExitClass c) {
  switch (c) {
    case ExitClass::kGoal: return "goal";
    case ExitClass::kObstacle: return "obstacle";
    case ExitClass::kOuter: return "outer";
    case ExitClass::kTimeout: return "timeout";
  }
  return "unknown";
}

namespace {

ExitClass exit_class(RegionKind kind) {
  switch (kind) {
    case RegionKind::kGoal: return ExitClass::kGoal;
    case RegionKind::kObstacle: return ExitClass::kObstacle;
    case RegionKind::kOuter: return ExitClass::kOuter;
  }
  return ExitClass::kOuter;
}

}  // namespace

Rollout simulate_rollout(const ControlProblem& problem, const FeedbackPolicy& policy, const Vector& z0,
                         RandomStream& rng, double dt_sim, double t_max, bool record) {
  if (!(dt_sim > 0.0)) throw std::invalid_argument("dt_sim must be positive");
  Rollout out;
  const double alpha = problem.discount();
  const double eps = problem.boundary_tolerance();
  Vector x = z0;

  RegionId region = kOuterRegion;
  if (problem.boundary_field(x, &region) >= -eps) {
    out.exit = exit_class(problem.region_kind(region));
    out.cost = problem.terminal_cost(region, x);
    if (record) {
      out.times.push_back(0.0);
      out.states.push_back(x);
      out.controls.push_back(Vector::Zero(problem.dim_u()));
    }
    return out;
  }

  double t = 0.0;
  double hold = 0.0;
  Vector u;
  Vector w(problem.dim_w());
  while (t < t_max) {
    if (hold <= 1e-12 * dt_sim) {
      const auto lk = policy.lookup(x);
      u = lk.control;
      hold = lk.duration > 0.0 ? lk.duration : dt_sim;
    }
    if (record) {
      out.times.push_back(t);
      out.states.push_back(x);
      out.controls.push_back(u);
    }
    const double dt = std::min({dt_sim, hold, t_max - t});
    for (int k = 0; k < w.size(); ++k) w[k] = rng.normal();
    const Vector next = x + problem.drift(x, u) * dt + problem.diffusion(x, u) * (std::sqrt(dt) * w);
    const double g = problem.cost_rate(x, u);
    const double weight = discount_factor(alpha, t);

    if (problem.boundary_field(next) >= -eps) {
      // Locate the crossing on the straight substep and stop on the surface.
      double lo = 0.0, hi = 1.0;
      Vector exit_point = next;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vector xm = x + mid * (next - x);
        const double phi = problem.boundary_field(xm);
        if (std::abs(phi) <= eps) {
          hi = mid;
          exit_point = xm;
          break;
        }
        if (phi < 0.0) {
          lo = mid;
        } else {
          hi = mid;
          exit_point = xm;
        }
        if (hi - lo <= 1e-8 && std::abs(problem.boundary_field(exit_point)) <= eps) break;
      }
      problem.boundary_field(exit_point, &region);
      out.cost += weight * g * hi * dt;
      out.exit_time = t + hi * dt;
      out.cost += discount_factor(alpha, out.exit_time) * problem.terminal_cost(region, exit_point);
      out.exit = exit_class(problem.region_kind(region));
      if (record) {
        out.times.push_back(out.exit_time);
        out.states.push_back(exit_point);
        out.controls.push_back(u);
      }
      return out;
    }
    out.cost += weight * g * dt;
    t += dt;
    hold -= dt;
    x = next;
  }
  out.exit = ExitClass::kTimeout;
  out.exit_time = t;
  if (record) {
    out.times.push_back(t);
    out.states.push_back(x);
    out.controls.push_back(u);
  }
  return out;
}

double default_dt_sim(const ControlProblem& problem, const FeedbackPolicy& policy) {
  double dt = policy.min_holding_time() / 4.0;
  double max_f = 0.0;
  RandomStream rng(0xd75u);
  const Box& sb = problem.state_box();
  const Box& cb = problem.control_box();
  for (int i = 0; i < 1024; ++i) {
    Vector x(sb.dim()), u(cb.dim());
    for (int k = 0; k < sb.dim(); ++k) x[k] = rng.uniform(sb.lo[k], sb.hi[k]);
    for (int k = 0; k < cb.dim(); ++k) u[k] = rng.uniform(cb.lo[k], cb.hi[k]);
    max_f = std::max(max_f, problem.drift(x, u).norm());
  }
  for (StateId i = 0; i < policy.size(); ++i) max_f = std::max(max_f, problem.drift(policy.state(i), policy.control(i)).norm());
  if (max_f > 0.0) dt = std::min(dt, 1e-2 * problem.diameter() / max_f);
  return dt;
}

RolloutReport evaluate(const ControlProblem& problem, const FeedbackPolicy& policy, const Vector& z0,
                       std::size_t trials, std::uint64_t seed, double dt_sim, double t_max) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  RolloutReport report;
  report.trials = trials;
  report.costs.resize(trials);
  report.exits.resize(trials);
  report.exit_times.resize(trials);
  const RandomStream base = RandomStream(seed).substream(StreamPurpose::kRollouts);
  for (std::size_t i = 0; i < trials; ++i) {
    RandomStream rng = base.substream(i);
    const Rollout r = simulate_rollout(problem, policy, z0, rng, dt_sim, t_max);
    report.costs[i] = r.cost;
    report.exits[i] = r.exit;
    report.exit_times[i] = r.exit_time;
    ++report.counts[static_cast<int>(r.exit)];
  }
  // shifted by the first cost so identical costs give a zero spread exactly
  const double shift = trials ? report.costs.front() : 0.0;
  double sum = 0.0;
  for (double c : report.costs) sum += c - shift;
  report.mean = shift + sum / double(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double c : report.costs) ss += (c - report.mean) * (c - report.mean);
    report.std_error = std::sqrt(ss / double(trials - 1)) / std::sqrt(double(trials));
  }
  return report;
}

void write_trajectory_csv(std::ostream& os, const Rollout& rollout) {
  if (rollout.states.empty()) return;
  const auto dx = rollout.states.front().size();
  const auto du = rollout.controls.front().size();
  os << "t";
  for (Eigen::Index k = 0; k < dx; ++k) os << ",x" << k + 1;
  for (Eigen::Index k = 0; k < du; ++k) os << ",u" << k + 1;
  os << '\n';
  for (std::size_t i = 0; i < rollout.states.size(); ++i) {
    os << rollout.times[i];
    for (Eigen::Index k = 0; k < dx; ++k) os << ',' << rollout.states[i][k];
    for (Eigen::Index k = 0; k < rollout.controls[i].size(); ++k) os << ',' << rollout.controls[i][k];
    os << '\n';
  }
}

}  // namespace imdp
