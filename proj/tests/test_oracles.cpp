#include <doctest.h>

#include <cmath>

#include "refinery/oracles.hpp"

using namespace refinery;

TEST_CASE("exact_expectation sums probability-weighted payloads") {
  DiscreteOutcomeSpace<double> space;
  space.outcomes = {{0.5, 1.0}, {0.5, -1.0}};
  CHECK(exact_expectation(space, [](double x) { return x; }) == 0.0);
  CHECK(exact_expectation(space, [](double x) { return std::max(x, -x); }) == 1.0);

  // linearity in f
  auto f = [](double x) { return 2.0 * x + 3.0; };
  auto g = [](double x) { return x * x; };
  const double combined = exact_expectation(space, [&](double x) { return f(x) + g(x); });
  CHECK(combined == exact_expectation(space, f) + exact_expectation(space, g));

  DiscreteOutcomeSpace<int> bad;
  bad.outcomes = {{0.7, 1}, {0.7, 2}};
  CHECK_THROWS_AS(exact_expectation(bad, [](int) { return 0.0; }), Error);
}

TEST_CASE("grid_maximize finds the parabola peak") {
  const auto result =
      grid_maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 10001);
  CHECK(std::abs(result.x - 0.3) <= 1e-4);
  CHECK(result.step == doctest::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("grid_maximize on the symmetric nash product") {
  const auto result = grid_maximize([](double x) { return x * (1.0 - x); }, 0.0, 1.0, 2001);
  CHECK(std::abs(result.x - 0.5) <= 5e-4);
}

TEST_CASE("2d grid finds the orthogonal corner") {
  const auto result = grid_maximize_2d([](double x, double y) { return x * (1.0 - y); },
                                       0.0, 1.0, 0.0, 1.0, 201);
  CHECK(result.x == 1.0);
  CHECK(result.y == 0.0);
  CHECK(result.value == 1.0);
}

TEST_CASE("grid ties resolve to the lowest lattice index") {
  const auto result = grid_maximize([](double) { return 1.0; }, 0.0, 1.0, 101);
  CHECK(result.x == 0.0);
  CHECK_THROWS_AS(grid_maximize([](double) { return 1.0; }, 0.0, 1.0, 50), Error);
}
