#include <doctest.h>

#include <cmath>
#include <numeric>

#include "imdp/nnls.hpp"
#include "imdp/rng.hpp"
#include "imdp/transition.hpp"
#include "support.hpp"

using namespace imdp;
using testing::vec;

namespace {

StepMoments moments_1d(double f, double var, double tau) {
  StepMoments m;
  m.shift = vec({f * tau});
  m.covariance = Matrix::Constant(1, 1, var * tau);
  return m;
}

std::vector<Vector> line(std::initializer_list<double> xs) {
  std::vector<Vector> out;
  for (double x : xs) out.push_back(vec({x}));
  return out;
}

double total(const std::vector<double>& p) { return std::accumulate(p.begin(), p.end(), 0.0); }

}  // namespace

TEST_CASE("nnls matches a hand solution") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 1, -1, 0;
  const auto r = solve_nnls(A, b);
  CHECK(r.converged);
  // unconstrained optimum (1,-1) is infeasible; with x2 = 0 the best x1 is 0.5
  CHECK(r.x[0] == doctest::Approx(0.5));
  CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("equality nnls meets the equalities exactly") {
  RandomStream rng(4);
  for (int t = 0; t < 50; ++t) {
    const int n = 6;
    Eigen::MatrixXd E(2, n), B(3, n);
    for (int j = 0; j < n; ++j) {
      E(0, j) = 1.0;
      E(1, j) = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < 3; ++i) B(i, j) = rng.uniform(-1.0, 1.0);
    }
    // a known feasible point keeps the equalities satisfiable
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
    const Eigen::VectorXd e = E * w;
    Eigen::VectorXd c(3);
    c << rng.normal(), rng.normal(), rng.normal();
    const Eigen::VectorXd x = solve_equality_nnls(E, e, B, c);
    CHECK((x.array() >= 0.0).all());
    CHECK((E * x - e).cwiseAbs().maxCoeff() < 1e-9);
    // never worse than the feasible uniform point
    CHECK((B * x - c).norm() <= (B * w - c).norm() + 1e-9);
  }
}

TEST_CASE("consistent weights on a three point stencil") {
  const auto m = moments_1d(0.5, 0.04, 0.05);
  const auto pts = line({-0.1, 0.0, 0.1});
  const auto p = consistent_weights(vec({0.0}), m, 0.05, pts, 1e-3);
  REQUIRE(p);
  CHECK((*p)[0] == doctest::Approx(0.00625).epsilon(1e-9));
  CHECK((*p)[1] == doctest::Approx(0.7375).epsilon(1e-9));
  CHECK((*p)[2] == doctest::Approx(0.25625).epsilon(1e-9));
  const auto res = moment_residual(vec({0.0}), m, pts, *p);
  CHECK(res.first <= 1e-12);
  CHECK(res.second <= 1e-12);
}

TEST_CASE("consistent weights are symmetric without drift") {
  const double delta = 0.2, tau = 0.1;
  const double var = 0.5 * delta * delta / tau;  // second moment half of delta^2
  const auto p = consistent_weights(vec({0.0}), moments_1d(0.0, var, tau), tau, line({-delta, 0.0, delta}), 1e-3);
  REQUIRE(p);
  CHECK((*p)[0] == doctest::Approx((*p)[2]));
  CHECK(total(*p) == doctest::Approx(1.0));
}

TEST_CASE("consistent weights refuse an unreachable second moment") {
  // support far wider than the step's spread
  const auto p = consistent_weights(vec({0.0}), moments_1d(0.0, 1e-4, 0.1), 0.1, line({-1.0, 1.0}), 1e-3);
  CHECK_FALSE(p);
}

TEST_CASE("gaussian weights") {
  const auto one = gaussian_weights(vec({0.0}), Matrix::Constant(1, 1, 0.3), line({2.0}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 1.0);

  const auto p = gaussian_weights(vec({0.1}), Matrix::Constant(1, 1, 0.1), line({0.1, 0.3}));
  CHECK(p[0] == doctest::Approx(0.54983).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(0.45017).epsilon(1e-5));

  const auto sym = gaussian_weights(vec({0.0}), Matrix::Constant(1, 1, 0.05), line({-0.3, 0.3}));
  CHECK(sym[0] == doctest::Approx(sym[1]));

  const auto point = gaussian_weights(vec({0.26}), Matrix::Zero(1, 1), line({0.0, 0.3, 0.5}));
  CHECK(point[1] == 1.0);
}

TEST_CASE("gaussian residuals shrink as the grid support grows") {
  const double tau = 0.05;
  const auto m = moments_1d(0.4, 0.2, tau);
  const Vector z = vec({0.0});
  const Vector mean = z + m.shift;
  const double h = 0.02;
  double last_first = INFINITY, last_second = INFINITY;
  for (int s : {8, 16, 32, 64}) {
    std::vector<Vector> pts;
    const double base = std::round(mean[0] / h) * h;
    for (int i = -s / 2; i < s / 2; ++i) pts.push_back(vec({base + h * i}));
    const auto p = gaussian_weights(mean, m.covariance, pts);
    const auto res = moment_residual(z, m, pts, p);
    CHECK(res.first < last_first);
    CHECK(res.second < last_second);
    last_first = res.first;
    last_second = res.second;
  }
}

TEST_CASE("consistent transition on a dense grid") {
  auto problem = testing::make(testing::single_integrator(1, -1.0, 1.0, 0.3));
  DiscreteModel model(1, 1);
  model.add_boundary_state(vec({-1.0}), 0.0);
  model.add_boundary_state(vec({1.0}), 0.0);
  for (int i = -99; i <= 99; ++i) model.add_interior_state(vec({i / 100.0}), 0.0, vec({0.0}), 0.1);
  AlgoParams params;
  RandomStream rng(2);
  for (int t = 0; t < 200; ++t) {
    const Vector z = vec({rng.uniform(-0.5, 0.5)});
    const Vector v = vec({rng.uniform(-1.0, 1.0)});
    const double tau = rng.uniform(0.01, 0.1);
    const auto tr = consistent_transition(*problem, model, z, v, tau, params);
    CHECK(tr.backend == TransitionBackend::kConsistent);
    CHECK(total(tr.probs) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<Vector> pts;
    for (auto id : tr.support) pts.push_back(model.state(id));
    const auto res = moment_residual(z, StepMoments::of(*problem, z, v, tau), pts, tr.probs);
    CHECK(res.first <= 1e-8);
    CHECK(res.second <= 1e-3 * tau);
  }
}

TEST_CASE("sparse states make the consistent backend infeasible") {
  auto problem = testing::make(testing::single_integrator(1, -1.0, 1.0, 0.01));
  DiscreteModel model(1, 1);
  model.add_boundary_state(vec({-1.0}), 0.0);
  model.add_boundary_state(vec({1.0}), 0.0);
  model.add_interior_state(vec({0.0}), 0.0, vec({0.0}), 0.1);
  AlgoParams params;
  CHECK_THROWS_WITH_AS(consistent_transition(*problem, model, vec({0.3}), vec({0.0}), 0.1, params),
                       "consistency infeasible", InfeasibleTransition);
  // dispatch falls back to the gaussian backend
  const auto tr = compute_transition(*problem, model, vec({0.3}), vec({0.0}), 0.1, params);
  CHECK(tr.backend == TransitionBackend::kGaussian);
  CHECK(total(tr.probs) == doctest::Approx(1.0));
}

TEST_CASE("gaussian support size") {
  CHECK(gaussian_support_size(1) == 4);
  CHECK(gaussian_support_size(10) == 5);
  CHECK(gaussian_support_size(1000) == 14);
}
