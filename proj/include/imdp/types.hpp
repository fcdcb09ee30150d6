#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace imdp {

// Largest state/control/noise dimension handled without heap allocation.
inline constexpr int kMaxDim = 8;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

using StateId = std::uint32_t;

}  // namespace imdp
