#pragma once

#include <initializer_list>
#include <memory>
#include <vector>

#include "imdp/problem.hpp"

namespace testing {

using imdp::Box;
using imdp::ControlProblem;
using imdp::Matrix;
using imdp::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Box{vec(lo), vec(hi)}; }

// dx = u dt + sigma dw on a box, running cost g, terminal cost h everywhere.
inline ControlProblem::Definition single_integrator(int d, double lo, double hi, double sigma, double g = 1.0,
                                                    double h = 0.0, double ubound = 1.0) {
  ControlProblem::Definition def;
  def.dim_x = d;
  def.dim_u = d;
  def.dim_w = d;
  def.drift = [](const Vector&, const Vector& u) { return Vector(u); };
  def.diffusion = [d, sigma](const Vector&, const Vector&) { return Matrix(sigma * Matrix::Identity(d, d)); };
  def.cost_rate = [g](const Vector&, const Vector&) { return g; };
  def.outer_terminal_cost = [h](const Vector&) { return h; };
  def.state_box = Box{Vector::Constant(d, lo), Vector::Constant(d, hi)};
  def.control_box = Box{Vector::Constant(d, -ubound), Vector::Constant(d, ubound)};
  def.discount = 0.95;
  def.steer = [](const Vector& from, const Vector& to, double T) -> std::optional<Vector> {
    return Vector((to - from) / T);
  };
  return def;
}

inline std::shared_ptr<const ControlProblem> make(ControlProblem::Definition def) {
  return std::make_shared<const ControlProblem>(std::move(def));
}

}  // namespace testing
