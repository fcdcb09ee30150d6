#pragma once

#include <cstddef>
#include <vector>

#include "imdp/problem.hpp"
#include "imdp/rng.hpp"

namespace imdp {

struct BoundarySample {
  Vector state;
  RegionId region = kOuterRegion;
};

/// Uniform sampling of the interior S° (rejection from the outer box) and of
/// ∂S (a surface piece chosen by its measure, then a uniform point on it).
class Sampler {
 public:
  static constexpr std::size_t kMaxRejections = 1'000'000;

  explicit Sampler(const ControlProblem& problem, std::size_t max_rejections = kMaxRejections);

  /// Throws ProblemError("interior volume too small") after max_rejections.
  Vector sample_interior(RandomStream& rng) const;
  BoundarySample sample_boundary(RandomStream& rng) const;

  /// Total (d-1)-dimensional measure of all surface pieces, before removing
  /// parts hidden inside other regions.
  double surface_measure() const { return total_measure_; }

 private:
  struct Piece {
    RegionId region;
    int axis;        // face normal axis, or -1 for a sphere
    bool upper;      // face at hi (true) or lo (false)
    double measure;
  };

  Vector sample_piece(const Piece& piece, RandomStream& rng) const;

  const ControlProblem* problem_;
  std::size_t max_rejections_;
  std::vector<Piece> pieces_;
  std::vector<double> cumulative_;
  double total_measure_ = 0.0;
};

}  // namespace imdp
