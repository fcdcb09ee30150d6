#include "imdp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imdp {
namespace {

double face_measure(const Box& box, int axis) {
  double m = 1.0;
  for (int j = 0; j < box.dim(); ++j)
    if (j != axis) m *= box.hi[j] - box.lo[j];
  return m;
}

double sphere_measure(int dim, double radius) {
  // 2 π^{d/2} / Γ(d/2) r^{d-1}; equals 2 (two points) when d = 1.
  const double d = dim;
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0) * std::pow(radius, d - 1.0);
}

}  // namespace

Sampler::Sampler(const ControlProblem& problem, std::size_t max_rejections)
    : problem_(&problem), max_rejections_(max_rejections) {
  auto add_box = [&](const Box& box, RegionId region) {
    for (int axis = 0; axis < box.dim(); ++axis) {
      const double m = face_measure(box, axis);
      pieces_.push_back({region, axis, false, m});
      pieces_.push_back({region, axis, true, m});
    }
  };
  add_box(problem.state_box(), kOuterRegion);
  for (std::size_t i = 0; i < problem.regions().size(); ++i) {
    const auto& r = problem.regions()[i];
    if (const auto* b = std::get_if<Box>(&r.shape)) {
      add_box(*b, static_cast<RegionId>(i));
    } else {
      const auto& ball = std::get<Ball>(r.shape);
      pieces_.push_back({static_cast<RegionId>(i), -1, false, sphere_measure(ball.dim(), ball.radius)});
    }
  }
  for (const auto& p : pieces_) {
    total_measure_ += p.measure;
    cumulative_.push_back(total_measure_);
  }
}

Vector Sampler::sample_interior(RandomStream& rng) const {
  const Box& box = problem_->state_box();
  Vector z(box.dim());
  for (std::size_t attempt = 0; attempt < max_rejections_; ++attempt) {
    for (int k = 0; k < box.dim(); ++k) z[k] = rng.uniform(box.lo[k], box.hi[k]);
    if (problem_->in_interior(z)) return z;
  }
  throw ProblemError("interior volume too small");
}

Vector Sampler::sample_piece(const Piece& piece, RandomStream& rng) const {
  const int dim = problem_->dim_x();
  if (piece.axis < 0) {
    const auto& ball = std::get<Ball>(problem_->regions()[static_cast<std::size_t>(piece.region)].shape);
    Vector dir(dim);
    double norm = 0.0;
    do {
      for (int k = 0; k < dim; ++k) dir[k] = rng.normal();
      norm = dir.norm();
    } while (norm < 1e-12);
    return ball.center + ball.radius * dir / norm;
  }
  const Box& box = piece.region == kOuterRegion
                       ? problem_->state_box()
                       : std::get<Box>(problem_->regions()[static_cast<std::size_t>(piece.region)].shape);
  Vector z(dim);
  for (int k = 0; k < dim; ++k) {
    z[k] = k == piece.axis ? (piece.upper ? box.hi[k] : box.lo[k]) : rng.uniform(box.lo[k], box.hi[k]);
  }
  return z;
}

BoundarySample Sampler::sample_boundary(RandomStream& rng) const {
  for (std::size_t attempt = 0; attempt < max_rejections_; ++attempt) {
    const double u = rng.uniform() * total_measure_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto& piece = pieces_[std::min<std::size_t>(it - cumulative_.begin(), pieces_.size() - 1)];
    Vector z = sample_piece(piece, rng);
    // Surface parts buried inside another region are not on ∂S.
    if (const auto region = problem_->boundary_region(z)) return {std::move(z), *region};
  }
  throw ProblemError("boundary of S could not be sampled");
}

}  // namespace imdp
