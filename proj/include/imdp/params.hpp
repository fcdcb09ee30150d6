#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace imdp {

enum class TransitionBackend { kConsistent, kGaussian };
enum class ControlMode { kUniform, kSteering };

std::string to_string(TransitionBackend backend);
std::string to_string(ControlMode mode);
TransitionBackend parse_backend(const std::string& name);
ControlMode parse_control_mode(const std::string& name);

/// Tunables of the incremental build. Defaults follow the experiments'
/// settings where those are published; scenarios may override them.
struct AlgoParams {
  // Holding time gamma_t * (ln k / k)^(theta * varsigma * rho / d_x).
  double gamma_t = 1.0;
  double varsigma = 0.999;
  double theta = 0.5;
  double rho = 0.5;

  // Backward-extension horizon T0; unset means "holding time at |S_n|".
  std::optional<double> extension_horizon;
  int extension_candidates = 16;
  int extension_substeps = 32;
  double min_duration = 1e-6;

  // L_n value-iteration rounds per iteration.
  int rounds = 1;
  // C_n = max(controls_min, ceil(controls_factor * ln |S_n|)).
  double controls_factor = 2.0;
  int controls_min = 4;
  ControlMode control_mode = ControlMode::kUniform;
  // Share of Z_update drawn round-robin over all interior states.
  double round_robin_fraction = 0.25;

  TransitionBackend backend = TransitionBackend::kConsistent;
  // Second-moment residual accepted by the consistent backend, times tau.
  double moment_tolerance = 1e-3;

  // Cap on |∂S_n| / |S_n|; unset means a boundary state every iteration.
  std::optional<double> boundary_fraction_max;

  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a value is outside its domain.
  void validate() const;
};

}  // namespace imdp
