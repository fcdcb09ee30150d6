#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "imdp/chain.hpp"
#include "imdp/params.hpp"
#include "imdp/problem.hpp"

namespace imdp {

/// A finite-support transition law out of `source` under `control` held for
/// `duration`.
struct TransitionDistribution {
  std::vector<StateId> support;
  std::vector<double> probs;
  Vector source;
  Vector control;
  double duration = 0.0;
  TransitionBackend backend = TransitionBackend::kConsistent;
};

class InfeasibleTransition : public std::runtime_error {
 public:
  InfeasibleTransition() : std::runtime_error("consistency infeasible") {}
};

struct MomentResidual {
  double first = 0.0;   // || sum p (z'-z) - f tau ||_2
  double second = 0.0;  // max-abs entry of sum p (z'-z)(z'-z)^T - (F F^T tau + f f^T tau^2)
};

/// Moment targets of one step: mean shift f tau and covariance F F^T tau.
struct StepMoments {
  Vector shift;
  Matrix covariance;

  static StepMoments of(const ControlProblem& problem, const Vector& z, const Vector& v, double tau);
  /// Radius c_r (|f| tau + sqrt(lambda_max(F F^T) tau) sqrt(d max(1, ln 1/tau))), c_r = 6.
  double support_radius(double tau) const;
};

MomentResidual moment_residual(const Vector& z, const StepMoments& m, std::span<const Vector> support,
                               std::span<const double> probs);

/// Probabilities on a given support matching sum-to-one and the first moment
/// exactly and the second moment in least squares, all nonnegative. Returns
/// nullopt when the moment residuals exceed (1e-8, tolerance * tau).
std::optional<std::vector<double>> consistent_weights(const Vector& z, const StepMoments& m, double tau,
                                                      std::span<const Vector> support, double tolerance);

/// Normalized Gaussian density weights N(mean, covariance) over the support.
/// A zero covariance puts all mass on the point closest to the mean.
std::vector<double> gaussian_weights(const Vector& mean, const Matrix& covariance, std::span<const Vector> support);

/// Moment-matching backend. The support is the union of the states nearest
/// to a stencil {m, m ± h_k e_k} around m = z + f tau along the eigenvectors
/// e_k of F F^T tau, with h_k = sqrt(2 d lambda_k). `support_size` defaults
/// to 2 d + 2 and doubles once (up to 8 d) when the first attempt fails.
std::optional<TransitionDistribution> try_consistent_transition(const ControlProblem& problem,
                                                                const DiscreteModel& model, const Vector& z,
                                                                const Vector& v, double tau,
                                                                const AlgoParams& params,
                                                                std::optional<std::size_t> support_size = {});

/// Fills `out` in place, reusing its storage. Returns false when infeasible.
bool try_consistent_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                               const Vector& v, double tau, const AlgoParams& params, TransitionDistribution& out,
                               std::optional<std::size_t> support_size = {});

/// As try_consistent_transition but throws InfeasibleTransition.
TransitionDistribution consistent_transition(const ControlProblem& problem, const DiscreteModel& model,
                                             const Vector& z, const Vector& v, double tau, const AlgoParams& params,
                                             std::optional<std::size_t> support_size = {});

/// Local Gaussian backend over the s = max(4, ceil(2 ln |Y|)) states nearest
/// to z + f tau.
TransitionDistribution gaussian_transition(const ControlProblem& problem, const DiscreteModel& model,
                                           const Vector& z, const Vector& v, double tau,
                                           std::optional<std::size_t> support_size = {});

void gaussian_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                         const Vector& v, double tau, TransitionDistribution& out,
                         std::optional<std::size_t> support_size = {});

std::size_t gaussian_support_size(std::size_t states);

/// Dispatch on params.backend; the consistent backend falls back to the
/// Gaussian one when infeasible.
TransitionDistribution compute_transition(const ControlProblem& problem, const DiscreteModel& model,
                                          const Vector& z, const Vector& v, double tau, const AlgoParams& params);
void compute_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                        const Vector& v, double tau, const AlgoParams& params, TransitionDistribution& out);

}  // namespace imdp
