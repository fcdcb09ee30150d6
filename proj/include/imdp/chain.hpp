#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "imdp/nearest_index.hpp"
#include "imdp/params.hpp"
#include "imdp/types.hpp"

namespace imdp {

/// gamma_t (ln k / k)^(theta varsigma rho / dim). Throws for k < 2.
double compute_holding_time(std::size_t k, double gamma_t, double varsigma, double theta, double rho, int dim);
double compute_holding_time(std::size_t k, const AlgoParams& params, int dim);

/// alpha^tau computed as exp(tau ln alpha); alpha = 0 discounts everything
/// after the first instant.
double discount_factor(double alpha, double tau);

/// The current finite MDP: sampled states with boundary flags, holding
/// times, cost values and controls, plus nearest-neighbour indices over all
/// states and over interior states only.
class DiscreteModel {
 public:
  DiscreteModel(int dim_x, int dim_u);

  int dim_x() const { return dim_x_; }
  int dim_u() const { return dim_u_; }
  std::size_t size() const { return boundary_.size(); }
  std::size_t interior_count() const { return interior_ids_.size(); }
  std::size_t boundary_count() const { return size() - interior_count(); }
  std::size_t iteration() const { return iteration_; }
  void set_iteration(std::size_t n) { iteration_ = n; }

  StateId add_boundary_state(const Vector& z, double terminal_cost);
  StateId add_interior_state(const Vector& z, double cost, const Vector& control, double holding_time);

  /// Overwrites (J, mu, dt, kappa) at an interior state.
  void improve(StateId id, double cost, const Vector& control, double holding_time, std::size_t kappa);

  Vector state(StateId id) const;
  const double* state_data(StateId id) const { return states_.data() + std::size_t(id) * dim_x_; }
  bool is_boundary(StateId id) const { return boundary_[id] != 0; }
  double cost(StateId id) const { return cost_[id]; }
  double holding_time(StateId id) const { return holding_time_[id]; }
  /// Control at an interior state; empty vector for boundary states.
  Vector control(StateId id) const;
  /// |S_n| at the last improving update; 0 until the first one.
  std::size_t last_update_size(StateId id) const { return kappa_[id]; }

  const std::vector<double>& costs() const { return cost_; }
  void set_cost(StateId id, double value) { cost_[id] = value; }
  const std::vector<StateId>& interior_ids() const { return interior_ids_; }

  const NearestIndex& all_index() const { return all_; }
  const NearestIndex& interior_index() const { return interior_; }

  /// Nearest state over S_n (ties to the lower id).
  StateId nearest_state(const Vector& z) const;
  /// Nearest interior state; throws std::out_of_range when there is none.
  StateId nearest_interior(const Vector& z) const;

  /// Cost value interpolated by nearest neighbour over all states.
  double interpolated_cost(const Vector& z) const { return cost_[nearest_state(z)]; }

  double min_holding_time() const;

 private:
  StateId append(const Vector& z, bool boundary);

  int dim_x_;
  int dim_u_;
  std::size_t iteration_ = 0;
  std::vector<double> states_;
  std::vector<char> boundary_;
  std::vector<double> holding_time_;
  std::vector<double> cost_;
  std::vector<double> control_;
  std::vector<std::size_t> kappa_;
  std::vector<StateId> interior_ids_;
  NearestIndex all_;
  NearestIndex interior_;
};

}  // namespace imdp
