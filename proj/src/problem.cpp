#include "imdp/problem.hpp"

#include <algorithm>
#include <cmath>

#include "imdp/rng.hpp"

namespace imdp {

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kOuter: return "outer";
    case RegionKind::kObstacle: return "obstacle";
    case RegionKind::kGoal: return "goal";
  }
  return "unknown";
}

bool Box::contains(const Vector& z) const {
  return (z.array() >= lo.array()).all() && (z.array() <= hi.array()).all();
}

double Box::signed_distance(const Vector& z) const {
  const Vector q = (lo - z).cwiseMax(z - hi);
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double Region::signed_distance(const Vector& z) const {
  return std::visit([&](const auto& s) { return s.signed_distance(z); }, shape);
}

namespace {

bool finite(const Vector& v) { return v.allFinite(); }
bool finite(const Matrix& m) { return m.allFinite(); }

bool region_inside_box(const Region& r, const Box& box) {
  if (const auto* b = std::get_if<Box>(&r.shape)) {
    return (b->lo.array() >= box.lo.array()).all() && (b->hi.array() <= box.hi.array()).all() &&
           (b->lo.array() <= b->hi.array()).all();
  }
  const auto& ball = std::get<Ball>(r.shape);
  return ball.radius > 0.0 && (ball.center.array() - ball.radius >= box.lo.array()).all() &&
         (ball.center.array() + ball.radius <= box.hi.array()).all();
}

}  // namespace

ControlProblem::ControlProblem(Definition def) : def_(std::move(def)) {
  auto& d = def_;
  if (d.dim_x <= 0 || d.dim_u <= 0 || d.dim_w <= 0) throw ProblemError("dimensions must be positive");
  if (d.dim_x > kMaxDim || d.dim_u > kMaxDim || d.dim_w > kMaxDim)
    throw ProblemError("dimension exceeds kMaxDim");
  if (!d.drift || !d.diffusion || !d.cost_rate) throw ProblemError("drift, diffusion and cost rate are required");
  if (!d.outer_terminal_cost) d.outer_terminal_cost = [](const Vector&) { return 0.0; };
  if (d.state_box.dim() != d.dim_x || d.state_box.hi.size() != d.dim_x)
    throw ProblemError("state box dimension mismatch");
  if (d.control_box.dim() != d.dim_u || d.control_box.hi.size() != d.dim_u)
    throw ProblemError("control box dimension mismatch");
  if (!((d.state_box.hi - d.state_box.lo).array() > 0.0).all()) throw ProblemError("state box has empty interior");
  if (!((d.control_box.hi - d.control_box.lo).array() >= 0.0).all()) throw ProblemError("control box is empty");
  if (!(d.discount >= 0.0 && d.discount < 1.0)) throw ProblemError("discount must lie in [0,1)");
  if (!(d.holder_exponent > 0.0 && d.holder_exponent <= 0.5))
    throw ProblemError("holder exponent must lie in (0, 0.5]");
  for (const auto& r : d.regions) {
    if (r.kind == RegionKind::kOuter) throw ProblemError("regions must be obstacles or goals");
    const int rd = std::visit([](const auto& s) { return s.dim(); }, r.shape);
    if (rd != d.dim_x) throw ProblemError("region dimension mismatch: " + r.name);
    if (!region_inside_box(r, d.state_box)) throw ProblemError("region outside the state box: " + r.name);
  }
  boundary_tolerance_ = 1e-9 * d.state_box.extent().norm();

  // Spot-check finiteness of the dynamics and nonemptiness of S.
  RandomStream rng(0x5eed, 99);
  bool found_interior = false;
  for (int i = 0; i < 20000; ++i) {
    Vector x(d.dim_x), u(d.dim_u);
    for (int k = 0; k < d.dim_x; ++k) x[k] = rng.uniform(d.state_box.lo[k], d.state_box.hi[k]);
    for (int k = 0; k < d.dim_u; ++k) u[k] = rng.uniform(d.control_box.lo[k], d.control_box.hi[k]);
    if (i < 256) {
      const Vector f = d.drift(x, u);
      const Matrix F = d.diffusion(x, u);
      if (f.size() != d.dim_x || !finite(f)) throw ProblemError("drift is not finite or has wrong size");
      if (F.rows() != d.dim_x || F.cols() != d.dim_w || !finite(F))
        throw ProblemError("diffusion is not finite or has wrong shape");
      if (!std::isfinite(d.cost_rate(x, u))) throw ProblemError("cost rate is not finite");
    }
    if (!found_interior && in_interior(x)) found_interior = true;
    if (found_interior && i >= 256) break;
  }
  if (!found_interior) throw ProblemError("interior of S is empty");
}

std::optional<Vector> ControlProblem::steer(const Vector& from, const Vector& to, double duration) const {
  if (!def_.steer) return std::nullopt;
  return def_.steer(from, to, duration);
}

double ControlProblem::boundary_field(const Vector& z, RegionId* region) const {
  double value = def_.state_box.signed_distance(z);
  RegionId best = kOuterRegion;
  for (std::size_t i = 0; i < def_.regions.size(); ++i) {
    const double v = -def_.regions[i].signed_distance(z);
    if (v >= value) {
      value = v;
      best = static_cast<RegionId>(i);
    }
  }
  if (region) *region = best;
  return value;
}

PointClass ControlProblem::classify(const Vector& z) const {
  const double phi = boundary_field(z);
  if (phi < -boundary_tolerance_) return PointClass::kInterior;
  if (phi <= boundary_tolerance_) return PointClass::kBoundary;
  return PointClass::kExterior;
}

std::optional<RegionId> ControlProblem::boundary_region(const Vector& z) const {
  RegionId id = kOuterRegion;
  const double phi = boundary_field(z, &id);
  if (std::abs(phi) > boundary_tolerance_) return std::nullopt;
  return id;
}

RegionKind ControlProblem::region_kind(RegionId id) const {
  if (id == kOuterRegion) return RegionKind::kOuter;
  return def_.regions.at(static_cast<std::size_t>(id)).kind;
}

double ControlProblem::terminal_cost_at(const Vector& z) const {
  const auto id = boundary_region(z);
  if (!id) throw ProblemError("not a boundary state");
  return terminal_cost(*id, z);
}

double ControlProblem::terminal_cost(RegionId id, const Vector& z) const {
  if (id == kOuterRegion) return def_.outer_terminal_cost(z);
  return def_.regions.at(static_cast<std::size_t>(id)).terminal_cost;
}

Vector ControlProblem::clip_control(const Vector& u) const {
  return u.cwiseMax(def_.control_box.lo).cwiseMin(def_.control_box.hi);
}

bool ControlProblem::is_nondegenerate(const std::vector<Vector>& states) const {
  const Vector u = 0.5 * (def_.control_box.lo + def_.control_box.hi);
  for (const auto& x : states) {
    const Matrix F = def_.diffusion(x, u);
    const Matrix cov = F * F.transpose();
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) return false;
    const double scale = std::max(cov.trace(), 1e-300);
    if (llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale)) return false;
  }
  return true;
}

}  // namespace imdp
