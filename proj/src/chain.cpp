#include "imdp/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace imdp {

std::string to_string(TransitionBackend backend) {
  return backend == TransitionBackend::kConsistent ? "consistent" : "gaussian";
}

std::string to_string(ControlMode mode) { return mode == ControlMode::kUniform ? "uniform" : "steering"; }

TransitionBackend parse_backend(const std::string& name) {
  if (name == "consistent") return TransitionBackend::kConsistent;
  if (name == "gaussian") return TransitionBackend::kGaussian;
  throw std::invalid_argument("unknown transition backend: " + name);
}

ControlMode parse_control_mode(const std::string& name) {
  if (name == "uniform") return ControlMode::kUniform;
  if (name == "steering") return ControlMode::kSteering;
  throw std::invalid_argument("unknown control mode: " + name);
}

void AlgoParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(gamma_t > 0.0, "gamma_t must be positive");
  require(varsigma > 0.0 && varsigma < 1.0, "varsigma must lie in (0,1)");
  require(theta > 0.0 && theta <= 1.0, "theta must lie in (0,1]");
  require(rho > 0.0 && rho <= 0.5, "rho must lie in (0,0.5]");
  require(!extension_horizon || *extension_horizon > 0.0, "extension horizon must be positive");
  require(extension_candidates >= 1, "extension_candidates must be >= 1");
  require(extension_substeps >= 1, "extension_substeps must be >= 1");
  require(min_duration > 0.0, "min_duration must be positive");
  require(rounds >= 1, "rounds (L_n) must be >= 1");
  require(controls_factor >= 0.0 && controls_min >= 1, "invalid control count schedule");
  require(round_robin_fraction >= 0.0 && round_robin_fraction <= 1.0, "round_robin_fraction must lie in [0,1]");
  require(moment_tolerance > 0.0, "moment_tolerance must be positive");
  require(!boundary_fraction_max || (*boundary_fraction_max > 0.0 && *boundary_fraction_max <= 1.0),
          "boundary_fraction_max must lie in (0,1]");
}

double compute_holding_time(std::size_t k, double gamma_t, double varsigma, double theta, double rho, int dim) {
  if (k < 2) throw std::invalid_argument("holding time needs at least two states");
  const double kd = static_cast<double>(k);
  return gamma_t * std::pow(std::log(kd) / kd, theta * varsigma * rho / dim);
}

double compute_holding_time(std::size_t k, const AlgoParams& p, int dim) {
  return compute_holding_time(k, p.gamma_t, p.varsigma, p.theta, p.rho, dim);
}

double discount_factor(double alpha, double tau) {
  if (alpha == 0.0) return tau > 0.0 ? 0.0 : 1.0;
  return std::exp(tau * std::log(alpha));
}

DiscreteModel::DiscreteModel(int dim_x, int dim_u)
    : dim_x_(dim_x), dim_u_(dim_u), all_(dim_x), interior_(dim_x) {}

StateId DiscreteModel::append(const Vector& z, bool boundary) {
  if (z.size() != dim_x_) throw std::invalid_argument("state dimension mismatch");
  const auto id = static_cast<StateId>(size());
  states_.insert(states_.end(), z.data(), z.data() + dim_x_);
  boundary_.push_back(boundary ? 1 : 0);
  holding_time_.push_back(0.0);
  cost_.push_back(0.0);
  control_.resize(control_.size() + dim_u_, std::numeric_limits<double>::quiet_NaN());
  kappa_.push_back(0);
  all_.insert(id, z);
  return id;
}

StateId DiscreteModel::add_boundary_state(const Vector& z, double terminal_cost) {
  const StateId id = append(z, true);
  cost_[id] = terminal_cost;
  return id;
}

StateId DiscreteModel::add_interior_state(const Vector& z, double cost, const Vector& control, double holding_time) {
  if (control.size() != dim_u_) throw std::invalid_argument("control dimension mismatch");
  const StateId id = append(z, false);
  interior_.insert(id, z);
  interior_ids_.push_back(id);
  improve(id, cost, control, holding_time, 0);
  return id;
}

void DiscreteModel::improve(StateId id, double cost, const Vector& control, double holding_time, std::size_t kappa) {
  if (is_boundary(id)) throw std::logic_error("boundary states keep their terminal cost");
  cost_[id] = cost;
  std::copy(control.data(), control.data() + dim_u_, control_.begin() + std::size_t(id) * dim_u_);
  holding_time_[id] = holding_time;
  kappa_[id] = kappa;
}

Vector DiscreteModel::state(StateId id) const {
  return Eigen::Map<const Eigen::VectorXd>(state_data(id), dim_x_);
}

Vector DiscreteModel::control(StateId id) const {
  if (is_boundary(id)) return Vector(0);
  return Eigen::Map<const Eigen::VectorXd>(control_.data() + std::size_t(id) * dim_u_, dim_u_);
}

StateId DiscreteModel::nearest_state(const Vector& z) const {
  const auto nn = all_.nearest(z, 1);
  if (nn.empty()) throw std::out_of_range("model has no states");
  return nn.front().id;
}

StateId DiscreteModel::nearest_interior(const Vector& z) const {
  const auto nn = interior_.nearest(z, 1);
  if (nn.empty()) throw std::out_of_range("model has no interior states");
  return nn.front().id;
}

double DiscreteModel::min_holding_time() const {
  double m = std::numeric_limits<double>::infinity();
  for (auto id : interior_ids_) m = std::min(m, holding_time_[id]);
  return m;
}

}  // namespace imdp
