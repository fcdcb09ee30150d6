#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "imdp/chain.hpp"
#include "imdp/params.hpp"
#include "imdp/problem.hpp"
#include "imdp/rng.hpp"
#include "imdp/transition.hpp"

namespace imdp {

struct UpdateOutcome {
  bool improved = false;
  double new_cost = 0.0;
  Vector control;
  double holding_time = 0.0;
  std::size_t support_size = 0;
};

/// C_n = max(controls_min, ceil(controls_factor * ln |S_n|)).
std::size_t control_count(std::size_t states, const AlgoParams& params);

/// `count` candidate controls at z. Uniform mode samples U; steering mode
/// steers toward the `count` nearest distinct states over `tau` and clips
/// into U (falling back to uniform samples when the problem has no steering).
/// `current`, when given, is appended.
std::vector<Vector> construct_controls(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                                       std::size_t count, double tau, const AlgoParams& params, RandomStream& rng,
                                       const std::optional<Vector>& current = {});

struct Extension {
  Vector origin;   // x(0)
  Vector control;
  double duration = 0.0;
  std::vector<Vector> path;  // x(0) ... x(duration) = z
};

/// A constant control v and duration tau <= horizon whose forward flow from
/// x(0) ends at z and stays in S, with x(0) as close as possible to `target`
/// among the candidate controls. nullopt when every candidate leaves S at
/// once.
std::optional<Extension> extend_backwards(const ControlProblem& problem, const Vector& z, const Vector& target,
                                          double horizon, const AlgoParams& params, RandomStream& rng);

/// tau g + alpha^tau sum_y p(y) J(y).
double backup_value(double tau, double running_cost, double alpha, const TransitionDistribution& t,
                    std::span<const double> values);

/// Fills `out` with the law under `control`; false when there is none.
using TransitionFn = std::function<bool(const Vector& control, TransitionDistribution& out)>;

/// Evaluates each control against the values as of entry and overwrites
/// (J, mu, dt, kappa) at `id` only when the best candidate beats J(id).
UpdateOutcome update_with(const ControlProblem& problem, DiscreteModel& model, StateId id,
                          std::span<const Vector> controls, double tau, const TransitionFn& transition);

/// One asynchronous Bellman update at an interior state.
UpdateOutcome update(const ControlProblem& problem, DiscreteModel& model, StateId id, const AlgoParams& params,
                     RandomStream& rng);

/// Synchronous Bellman operator over a frozen model with a fixed control
/// list. Transitions are built once; apply() is pure.
class BellmanOperator {
 public:
  struct Action {
    double stage_cost = 0.0;  // tau g
    double discount = 1.0;    // alpha^tau
    std::vector<StateId> support;
    std::vector<double> probs;
  };

  /// Hand-built operator: boundary states return `terminal`, interior ones
  /// minimize over their actions.
  BellmanOperator(std::vector<char> boundary, std::vector<double> terminal, std::vector<std::vector<Action>> actions);

  /// Operator of a model snapshot, using each state's stored holding time.
  BellmanOperator(const ControlProblem& problem, const DiscreteModel& model, std::span<const Vector> controls,
                  const AlgoParams& params);

  std::size_t size() const { return boundary_.size(); }
  std::vector<double> apply(std::span<const double> values) const;
  /// Largest discount over all actions, alpha^(min dt).
  double modulus() const;

 private:
  std::vector<char> boundary_;
  std::vector<double> terminal_;
  std::vector<std::vector<Action>> actions_;
};

}  // namespace imdp
