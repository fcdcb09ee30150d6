#include "imdp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace imdp {

std::size_t update_set_size(std::size_t states, std::size_t interior, double theta) {
  if (states < 2 || interior == 0) return 0;
  auto k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(states), theta)));
  return std::min({k, states - 1, interior});
}

Planner::Planner(std::shared_ptr<const ControlProblem> problem, AlgoParams params, std::vector<Vector> probes)
    : problem_(std::move(problem)),
      params_(params),
      probes_(std::move(probes)),
      sampler_(*problem_),
      model_(problem_->dim_x(), problem_->dim_u()),
      interior_rng_(RandomStream(params.seed).substream(StreamPurpose::kInterior)),
      boundary_rng_(RandomStream(params.seed).substream(StreamPurpose::kBoundary)),
      controls_rng_(RandomStream(params.seed).substream(StreamPurpose::kControls)),
      extension_rng_(RandomStream(params.seed).substream(StreamPurpose::kExtension)) {
  params_.validate();
}

bool Planner::boundary_allowed() const {
  if (!params_.boundary_fraction_max || model_.boundary_count() == 0) return true;
  const double share = double(model_.boundary_count() + 1) / double(model_.size() + 1);
  return share <= *params_.boundary_fraction_max;
}

std::vector<StateId> Planner::update_set(StateId fresh) {
  const std::size_t interior = model_.interior_count();
  const std::size_t k = std::min(update_set_size(model_.size(), interior, params_.theta), interior - 1);
  const auto r = static_cast<std::size_t>(std::floor(params_.round_robin_fraction * double(k)));
  std::vector<StateId> ids{fresh};
  ids.reserve(k + 1);
  for (const auto& n : model_.interior_index().nearest(model_.state(fresh), k - r + 1)) {
    if (n.id != fresh && ids.size() < k - r + 1) ids.push_back(n.id);
  }
  const auto& all = model_.interior_ids();
  for (std::size_t tries = 0, taken = 0; taken < r && tries < all.size(); ++tries) {
    const StateId id = all[cursor_ % all.size()];
    ++cursor_;
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) continue;
    ids.push_back(id);
    ++taken;
  }
  return ids;
}

IterationTrace Planner::step() {
  const auto start = std::chrono::steady_clock::now();
  const ControlProblem& problem = *problem_;
  IterationTrace trace;
  trace.n = model_.iteration() + 1;

  if (boundary_allowed()) {
    const BoundarySample b = sampler_.sample_boundary(boundary_rng_);
    model_.add_boundary_state(b.state, problem.terminal_cost_at(b.state));
    trace.boundary_added = true;
  }

  if (model_.size() > 0) {
    const Vector sample = sampler_.sample_interior(interior_rng_);
    const StateId nearest = model_.nearest_state(sample);
    const double horizon = params_.extension_horizon.value_or(
        compute_holding_time(std::max<std::size_t>(model_.size(), 2), params_, problem.dim_x()));
    const auto ext = extend_backwards(problem, model_.state(nearest), sample, horizon, params_, extension_rng_);
    if (ext && problem.in_interior(ext->origin)) {
      const double tau = ext->duration;
      const double cost = tau * problem.cost_rate(ext->origin, ext->control) +
                          discount_factor(problem.discount(), tau) * model_.cost(nearest);
      const StateId fresh = model_.add_interior_state(ext->origin, cost, ext->control, tau);
      trace.extended = true;
      last_selected_.resize(model_.size(), 0);
      for (int round = 0; round < params_.rounds; ++round) {
        for (StateId id : update_set(fresh)) {
          const double before = model_.cost(id);
          update(problem, model_, id, params_, controls_rng_);
          trace.sup_change = std::max(trace.sup_change, std::abs(model_.cost(id) - before));
          last_selected_[id] = trace.n;
          ++trace.updated;
        }
      }
    }
  }
  last_selected_.resize(model_.size(), 0);
  model_.set_iteration(trace.n);
  trace.size = model_.size();
  trace.probes.reserve(probes_.size());
  for (const auto& p : probes_) trace.probes.push_back(model_.interpolated_cost(p));
  trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::vector<IterationTrace> Planner::run(std::size_t iterations, const Callback& callback) {
  std::vector<IterationTrace> traces;
  traces.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    traces.push_back(step());
    if (callback) callback(traces.back(), model_);
  }
  return traces;
}

}  // namespace imdp
