#pragma once

// Five states on a line: 0 and 4 absorb (h = 0 and h = 10), 1..3 choose
// between drifting left or right. Exact values by enumerating every policy
// and solving its linear system.

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "imdp/bellman.hpp"
#include "imdp/chain.hpp"
#include "imdp/problem.hpp"
#include "support.hpp"

namespace tiny {

inline constexpr int kStates = 5;
inline constexpr int kActions = 2;
inline constexpr double kTau = 1.0;
inline constexpr double kAlpha = 0.9;
inline constexpr std::array<double, kStates> kTerminal{0.0, 0.0, 0.0, 0.0, 10.0};

struct Move {
  double cost_rate;
  std::array<double, kStates> p;
};

// move[state][action]
inline Move move(int s, int a) {
  static const Move table[3][2] = {
      {{2.0, {0.7, 0.2, 0.1, 0.0, 0.0}}, {1.0, {0.1, 0.3, 0.6, 0.0, 0.0}}},
      {{1.5, {0.0, 0.6, 0.3, 0.1, 0.0}}, {0.5, {0.0, 0.2, 0.2, 0.6, 0.0}}},
      {{3.0, {0.0, 0.0, 0.8, 0.1, 0.1}}, {0.2, {0.0, 0.0, 0.1, 0.3, 0.6}}},
  };
  return table[s - 1][a];
}

inline bool boundary(int s) { return s == 0 || s == kStates - 1; }

inline std::vector<double> exact_values() {
  std::vector<double> best(kStates, INFINITY);
  for (int code = 0; code < (1 << 3); ++code) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (int s = 1; s <= 3; ++s) {
      const Move m = move(s, (code >> (s - 1)) & 1);
      const double disc = std::pow(kAlpha, kTau);
      b[s - 1] = kTau * m.cost_rate;
      for (int y = 0; y < kStates; ++y) {
        if (boundary(y)) b[s - 1] += disc * m.p[y] * kTerminal[y];
        else A(s - 1, y - 1) -= disc * m.p[y];
      }
    }
    const Eigen::Vector3d J = A.lu().solve(b);
    for (int s = 1; s <= 3; ++s) best[s] = std::min(best[s], J[s - 1]);
  }
  best[0] = kTerminal[0];
  best[kStates - 1] = kTerminal[kStates - 1];
  return best;
}

inline std::shared_ptr<const imdp::ControlProblem> problem() {
  auto def = testing::single_integrator(1, 0.0, 4.0, 0.0);
  def.discount = kAlpha;
  def.cost_rate = [](const imdp::Vector& z, const imdp::Vector& v) {
    const int s = static_cast<int>(std::lround(z[0]));
    return move(s, static_cast<int>(v[0])).cost_rate;
  };
  def.outer_terminal_cost = [](const imdp::Vector& z) { return z[0] > 2.0 ? 10.0 : 0.0; };
  def.control_box = testing::box({0.0}, {1.0});
  return testing::make(def);
}

inline imdp::DiscreteModel model(double initial) {
  imdp::DiscreteModel m(1, 1);
  for (int s = 0; s < kStates; ++s) {
    if (boundary(s)) m.add_boundary_state(testing::vec({double(s)}), kTerminal[s]);
    else m.add_interior_state(testing::vec({double(s)}), initial, testing::vec({0.0}), kTau);
  }
  return m;
}

inline imdp::TransitionFn transition(int s) {
  return [s](const imdp::Vector& v, imdp::TransitionDistribution& out) {
    const Move m = move(s, static_cast<int>(v[0]));
    out.support.clear();
    out.probs.clear();
    for (int y = 0; y < kStates; ++y) {
      if (m.p[y] == 0.0) continue;
      out.support.push_back(static_cast<imdp::StateId>(y));
      out.probs.push_back(m.p[y]);
    }
    out.duration = kTau;
    return true;
  };
}

inline std::vector<imdp::Vector> controls() { return {testing::vec({0.0}), testing::vec({1.0})}; }

inline imdp::BellmanOperator op() {
  std::vector<char> b(kStates);
  std::vector<double> h(kTerminal.begin(), kTerminal.end());
  std::vector<std::vector<imdp::BellmanOperator::Action>> actions(kStates);
  for (int s = 0; s < kStates; ++s) {
    b[s] = boundary(s) ? 1 : 0;
    if (b[s]) continue;
    for (int a = 0; a < kActions; ++a) {
      const Move m = move(s, a);
      imdp::BellmanOperator::Action act;
      act.stage_cost = kTau * m.cost_rate;
      act.discount = std::pow(kAlpha, kTau);
      for (int y = 0; y < kStates; ++y) {
        if (m.p[y] == 0.0) continue;
        act.support.push_back(static_cast<imdp::StateId>(y));
        act.probs.push_back(m.p[y]);
      }
      actions[s].push_back(act);
    }
  }
  return imdp::BellmanOperator(b, h, actions);
}

// Sweeps of asynchronous updates in a fixed order until nothing moves.
inline int converge(const imdp::ControlProblem& problem, imdp::DiscreteModel& m, int max_sweeps = 10000) {
  const auto ctrl = controls();
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (int s = 1; s < kStates - 1; ++s) {
      const double before = m.cost(s);
      imdp::update_with(problem, m, static_cast<imdp::StateId>(s), ctrl, kTau, transition(s));
      change = std::max(change, std::abs(m.cost(s) - before));
    }
    if (change == 0.0) return sweep;
  }
  return max_sweeps;
}

}  // namespace tiny
