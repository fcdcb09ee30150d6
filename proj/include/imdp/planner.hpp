#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "imdp/bellman.hpp"
#include "imdp/chain.hpp"
#include "imdp/params.hpp"
#include "imdp/problem.hpp"
#include "imdp/rng.hpp"
#include "imdp/sampling.hpp"

namespace imdp {

struct IterationTrace {
  std::size_t n = 0;
  std::size_t size = 0;
  double wall_ms = 0.0;
  std::size_t updated = 0;
  double sup_change = 0.0;
  bool boundary_added = false;
  bool extended = false;
  std::vector<double> probes;
};

/// K_n = ceil(|S_n|^theta), capped at |S_n| - 1 and at the interior count.
std::size_t update_set_size(std::size_t states, std::size_t interior, double theta);

/// The incremental loop. Each step adds a boundary sample, extends backwards
/// from the state nearest to an interior sample, and runs L_n rounds of
/// asynchronous updates around the new state.
class Planner {
 public:
  using Callback = std::function<void(const IterationTrace&, const DiscreteModel&)>;

  /// Probe values in traces use nearest-neighbour interpolation over S_n.
  Planner(std::shared_ptr<const ControlProblem> problem, AlgoParams params, std::vector<Vector> probes = {});

  IterationTrace step();
  /// Runs `iterations` more steps; the callback sees every trace.
  std::vector<IterationTrace> run(std::size_t iterations, const Callback& callback = {});

  const DiscreteModel& model() const { return model_; }
  DiscreteModel& mutable_model() { return model_; }
  const ControlProblem& problem() const { return *problem_; }
  std::shared_ptr<const ControlProblem> problem_ptr() const { return problem_; }
  const AlgoParams& params() const { return params_; }
  std::size_t iteration() const { return model_.iteration(); }
  /// Last iteration at which a state was in Z_update (0 if never).
  std::size_t last_selected(StateId id) const { return id < last_selected_.size() ? last_selected_[id] : 0; }

 private:
  std::vector<StateId> update_set(StateId fresh);
  bool boundary_allowed() const;

  std::shared_ptr<const ControlProblem> problem_;
  AlgoParams params_;
  std::vector<Vector> probes_;
  Sampler sampler_;
  DiscreteModel model_;
  RandomStream interior_rng_;
  RandomStream boundary_rng_;
  RandomStream controls_rng_;
  RandomStream extension_rng_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> last_selected_;
};

}  // namespace imdp
