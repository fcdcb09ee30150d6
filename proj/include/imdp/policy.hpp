#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "imdp/chain.hpp"
#include "imdp/nearest_index.hpp"
#include "imdp/problem.hpp"
#include "imdp/rng.hpp"

namespace imdp {

/// Frozen nearest-neighbour feedback policy over the interior states of a
/// model: the control at the closest state, held for its holding time.
class FeedbackPolicy {
 public:
  struct Lookup {
    Vector control;
    double duration = 0.0;
    StateId state = 0;  // position in this snapshot
  };

  explicit FeedbackPolicy(const DiscreteModel& model);

  int dim_x() const { return dim_x_; }
  std::size_t size() const { return durations_.size(); }
  /// Throws std::runtime_error("empty policy") without interior states.
  Lookup lookup(const Vector& z) const;
  double min_holding_time() const;
  const Vector& state(StateId i) const { return states_[i]; }
  const Vector& control(StateId i) const { return controls_[i]; }

 private:
  int dim_x_;
  std::vector<Vector> states_;
  std::vector<Vector> controls_;
  std::vector<double> durations_;
  NearestIndex index_;
};

enum class ExitClass { kGoal = 0, kObstacle = 1, kOuter = 2, kTimeout = 3 };

std::string to_string(ExitClass c);

struct Rollout {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> controls;
  double cost = 0.0;
  double exit_time = 0.0;
  ExitClass exit = ExitClass::kTimeout;
};

/// Euler-Maruyama simulation under the policy until the first exit from the
/// interior (located by bisection on the last substep) or t_max. The cost is
/// sum alpha^t g dt plus alpha^t_exit h. Trajectories are kept only when
/// `record` is set.
Rollout simulate_rollout(const ControlProblem& problem, const FeedbackPolicy& policy, const Vector& z0,
                         RandomStream& rng, double dt_sim, double t_max, bool record = false);

/// min holding time / 4, capped at 1e-2 * diameter / max |f| (sampled).
double default_dt_sim(const ControlProblem& problem, const FeedbackPolicy& policy);

struct RolloutReport {
  std::size_t trials = 0;
  std::vector<double> costs;
  std::vector<ExitClass> exits;
  std::vector<double> exit_times;
  double mean = 0.0;
  double std_error = 0.0;
  std::array<std::size_t, 4> counts{};

  double fraction(ExitClass c) const { return trials ? double(counts[static_cast<int>(c)]) / double(trials) : 0.0; }
};

/// Independent rollouts; trial i draws from substream i of `seed`'s rollout
/// stream, so the report does not depend on how trials are scheduled.
RolloutReport evaluate(const ControlProblem& problem, const FeedbackPolicy& policy, const Vector& z0,
                       std::size_t trials, std::uint64_t seed, double dt_sim, double t_max);

/// CSV rows t, x1..xd, u1..um.
void write_trajectory_csv(std::ostream& os, const Rollout& rollout);

}  // namespace imdp
