#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "imdp/types.hpp"

namespace imdp {

struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vector extent() const { return hi - lo; }
  bool contains(const Vector& z) const;
  /// Signed Euclidean distance to the box surface, negative inside.
  double signed_distance(const Vector& z) const;
};

struct Ball {
  Vector center;
  double radius = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  double signed_distance(const Vector& z) const { return (z - center).norm() - radius; }
};

using Shape = std::variant<Box, Ball>;

enum class RegionKind { kOuter, kObstacle, kGoal };

std::string to_string(RegionKind kind);

/// An obstacle or goal set carved out of the outer box. Its terminal cost is
/// charged on its own boundary.
struct Region {
  RegionKind kind = RegionKind::kObstacle;
  Shape shape;
  double terminal_cost = 0.0;
  std::string name;

  double signed_distance(const Vector& z) const;
};

// Index of the region whose boundary a state lies on; kOuterRegion is the box.
using RegionId = int;
inline constexpr RegionId kOuterRegion = -1;

enum class PointClass { kInterior, kBoundary, kExterior };

class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Controlled diffusion dx = f(x,u) dt + F(x,u) dw on a bounded set
/// S = box \ (goal ∪ obstacles), discounted running cost g and terminal cost h
/// charged at the first exit from the interior of S.
class ControlProblem {
 public:
  using DriftFn = std::function<Vector(const Vector&, const Vector&)>;
  using DiffusionFn = std::function<Matrix(const Vector&, const Vector&)>;
  using CostRateFn = std::function<double(const Vector&, const Vector&)>;
  using TerminalCostFn = std::function<double(const Vector&)>;
  /// Constant control moving `from` to `to` in `duration` under the
  /// deterministic flow, if a closed form exists. Result is not clipped.
  using SteerFn = std::function<std::optional<Vector>(const Vector& from, const Vector& to, double duration)>;

  struct Definition {
    int dim_x = 0;
    int dim_u = 0;
    int dim_w = 0;
    DriftFn drift;
    DiffusionFn diffusion;
    CostRateFn cost_rate;
    TerminalCostFn outer_terminal_cost;
    Box state_box;
    Box control_box;
    std::vector<Region> regions;
    double discount = 0.95;
    double holder_exponent = 0.5;
    SteerFn steer;
  };

  /// Validates the definition; throws ProblemError on violated invariants.
  explicit ControlProblem(Definition def);

  int dim_x() const { return def_.dim_x; }
  int dim_u() const { return def_.dim_u; }
  int dim_w() const { return def_.dim_w; }
  double discount() const { return def_.discount; }
  double holder_exponent() const { return def_.holder_exponent; }
  const Box& state_box() const { return def_.state_box; }
  const Box& control_box() const { return def_.control_box; }
  const std::vector<Region>& regions() const { return def_.regions; }
  double boundary_tolerance() const { return boundary_tolerance_; }
  double diameter() const { return def_.state_box.extent().norm(); }

  Vector drift(const Vector& x, const Vector& u) const { return def_.drift(x, u); }
  Matrix diffusion(const Vector& x, const Vector& u) const { return def_.diffusion(x, u); }
  double cost_rate(const Vector& x, const Vector& u) const { return def_.cost_rate(x, u); }

  bool has_steering() const { return static_cast<bool>(def_.steer); }
  std::optional<Vector> steer(const Vector& from, const Vector& to, double duration) const;

  /// Signed distance-like field for S: negative in the interior, zero on ∂S.
  /// `region` receives the id of the surface realizing the value.
  double boundary_field(const Vector& z, RegionId* region = nullptr) const;

  PointClass classify(const Vector& z) const;
  bool in_interior(const Vector& z) const { return classify(z) == PointClass::kInterior; }

  /// Region whose boundary contains z, or nullopt when z is not within the
  /// boundary tolerance of ∂S.
  std::optional<RegionId> boundary_region(const Vector& z) const;
  RegionKind region_kind(RegionId id) const;

  /// h(z) for z on ∂S; throws ProblemError("not a boundary state") otherwise.
  double terminal_cost_at(const Vector& z) const;
  /// Terminal cost charged on the surface of region `id` at z.
  double terminal_cost(RegionId id, const Vector& z) const;

  Vector clip_control(const Vector& u) const;

  /// True when F F^T is positive definite at every given state (using the
  /// control-box centre). Degenerate problems still run; the Gaussian
  /// transition backend handles them by regularization.
  bool is_nondegenerate(const std::vector<Vector>& states) const;

 private:
  Definition def_;
  double boundary_tolerance_ = 0.0;
};

}  // namespace imdp
