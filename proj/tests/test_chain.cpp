#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "imdp/chain.hpp"
#include "imdp/nearest_index.hpp"
#include "imdp/rng.hpp"
#include "support.hpp"

using namespace imdp;
using testing::vec;

TEST_CASE("nearest index on a line") {
  NearestIndex index(1);
  CHECK(index.nearest(vec({0.0}), 1).empty());
  index.insert(0, vec({0.0}));
  index.insert(1, vec({1.0}));
  index.insert(2, vec({4.0}));

  auto nn = index.nearest(vec({0.6}), 1);
  REQUIRE(nn.size() == 1);
  CHECK(nn[0].id == 1);
  CHECK(nn[0].distance == doctest::Approx(0.4));

  nn = index.nearest(vec({0.5}), 1);
  CHECK(nn[0].id == 0);

  nn = index.nearest(vec({0.6}), 2);
  REQUIRE(nn.size() == 2);
  CHECK(nn[0].id == 1);
  CHECK(nn[1].id == 0);

  CHECK(index.nearest(vec({4.0}), 10).size() == 3);
  CHECK_THROWS_AS(index.insert(1, vec({2.0})), std::invalid_argument);
  CHECK_THROWS_AS(index.insert(7, vec({2.0, 1.0})), std::invalid_argument);
}

TEST_CASE("nearest index agrees with a brute-force scan") {
  for (int d : {1, 2, 3, 6}) {
    RandomStream rng(40 + d);
    NearestIndex index(d, 4);
    std::vector<Vector> pts;
    for (StateId i = 0; i < 1500; ++i) {
      Vector z(d);
      // coarse grid so that exact ties and duplicates occur
      for (int k = 0; k < d; ++k) z[k] = std::floor(rng.uniform(0.0, 8.0)) / 2.0;
      pts.push_back(z);
      index.insert(i, z);
    }
    for (int q = 0; q < 200; ++q) {
      Vector z(d);
      for (int k = 0; k < d; ++k) z[k] = rng.uniform(-0.5, 4.5);
      const std::size_t k = 1 + rng.below(20);
      std::vector<std::pair<double, StateId>> brute;
      for (StateId i = 0; i < pts.size(); ++i) brute.emplace_back((pts[i] - z).squaredNorm(), i);
      std::sort(brute.begin(), brute.end());
      const auto nn = index.nearest(z, k);
      REQUIRE(nn.size() == k);
      for (std::size_t j = 0; j < k; ++j) CHECK(nn[j].id == brute[j].second);
    }
  }
}

TEST_CASE("holding time") {
  CHECK(compute_holding_time(100, 1.0, 1.0, 1.0, 0.5, 1) == doctest::Approx(0.214596).epsilon(1e-6));
  CHECK(compute_holding_time(3, 2.0, 0.99, 0.5, 0.5, 2) == doctest::Approx(1.7664).epsilon(1e-4));
  CHECK(compute_holding_time(50, 2.0, 0.99, 0.5, 0.5, 2) ==
        doctest::Approx(2.0 * compute_holding_time(50, 1.0, 0.99, 0.5, 0.5, 2)));
  for (std::size_t k = 3; k < 2000; k += 7)
    CHECK(compute_holding_time(k + 1, 1.0, 0.99, 0.5, 0.5, 1) < compute_holding_time(k, 1.0, 0.99, 0.5, 0.5, 1));
  CHECK_THROWS_AS(compute_holding_time(1, 1.0, 0.99, 0.5, 0.5, 1), std::invalid_argument);
}

TEST_CASE("discount factor") {
  CHECK(discount_factor(0.9, 0.1) == doctest::Approx(0.989519).epsilon(1e-6));
  CHECK(discount_factor(0.95, 0.0) == 1.0);
  CHECK(discount_factor(0.0, 0.5) == 0.0);
}

TEST_CASE("boundary and interior states") {
  DiscreteModel model(1, 1);
  const StateId b = model.add_boundary_state(vec({6.0}), 414.55);
  CHECK(model.size() == 1);
  CHECK(model.is_boundary(b));
  CHECK(model.cost(b) == doctest::Approx(414.55));
  CHECK(model.holding_time(b) == 0.0);
  CHECK(model.control(b).size() == 0);

  const double tau = 0.1;
  const double init = tau * 1.0 + discount_factor(0.9, tau) * 10.0;
  CHECK(init == doctest::Approx(9.99519).epsilon(1e-6));
  const StateId i = model.add_interior_state(vec({5.0}), init, vec({0.3}), tau);
  CHECK(model.size() == 2);
  CHECK_FALSE(model.is_boundary(i));
  CHECK(model.interior_count() == 1);
  CHECK(model.nearest_state(vec({5.9})) == b);
  CHECK(model.nearest_interior(vec({5.9})) == i);
  CHECK(model.interpolated_cost(vec({4.0})) == doctest::Approx(9.99519).epsilon(1e-6));
  CHECK_THROWS_AS(model.improve(b, 1.0, vec({0.0}), 0.1, 2), std::logic_error);
  model.improve(i, 3.0, vec({-1.0}), 0.05, 2);
  CHECK(model.cost(i) == 3.0);
  CHECK(model.holding_time(i) == 0.05);
  CHECK(model.last_update_size(i) == 2);
}

TEST_CASE("zero running cost and zero neighbour value initialize to zero") {
  const double init = 0.2 * 0.0 + discount_factor(0.95, 0.2) * 0.0;
  CHECK(init == 0.0);
}
