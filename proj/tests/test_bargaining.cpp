#include <doctest.h>

#include <cmath>

#include "refinery/bargaining.hpp"
#include "refinery/oracles.hpp"

using namespace refinery;

namespace {

BargainingSpec linear_spec(double sigma, double rho) {
  BargainingSpec spec;
  spec.v1 = ValueFunction::linear();
  spec.v2 = ValueFunction::linear();
  spec.weights.sigma = sigma;
  spec.weights.rho = rho;
  return spec;
}

BargainingSpec sqrt_spec(double sigma, double rho) {
  BargainingSpec spec;
  spec.v1 = ValueFunction::power(0.5);
  spec.v2 = ValueFunction::power(0.5);
  spec.weights.sigma = sigma;
  spec.weights.rho = rho;
  return spec;
}

// Grid check that nothing feasible beats the reported solution by more
// than the stated slack in both coordinates.
void check_pareto_2d(const BargainingSpec& spec, std::pair<double, double> weights,
                     const BargainingSolution& sol, double slack = 1e-6) {
  const double w1 = weights.first, w2 = weights.second;
  auto u1 = [&](double x1, double x2) { return w1 * spec.v1(x1) + (1.0 - w1) * spec.v2(x2); };
  auto u2 = [&](double x1, double x2) {
    return w2 * spec.v1(1.0 - x1) + (1.0 - w2) * spec.v2(1.0 - x2);
  };
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const double x1 = i / 200.0, x2 = j / 200.0;
      const bool better1 = u1(x1, x2) > sol.payoff1 + slack;
      const bool better2 = u2(x1, x2) > sol.payoff2 + slack;
      const bool no_worse1 = u1(x1, x2) >= sol.payoff1 - slack;
      const bool no_worse2 = u2(x1, x2) >= sol.payoff2 - slack;
      if ((better1 && no_worse2) || (better2 && no_worse1)) {
        FAIL("found a Pareto improvement at (", x1, ",", x2, ")");
      }
    }
  }
}

}  // namespace

TEST_CASE("1d solution on symmetric linear utilities") {
  const auto sol = nash_solution_1d(ValueFunction::linear(), {0.0, 0.0});
  CHECK(sol.allocation[0] == 0.5);
  CHECK(sol.payoff1 == 0.5);
  CHECK(sol.payoff2 == 0.5);
}

TEST_CASE("1d solution on square-root utilities") {
  const auto sol = nash_solution_1d(ValueFunction::power(0.5), {0.0, 0.0});
  CHECK(sol.allocation[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.payoff1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(sol.payoff1 == sol.payoff2);
}

TEST_CASE("infeasible disagreement is rejected") {
  CHECK_THROWS_AS(nash_solution_1d(ValueFunction::linear(), {0.9, 0.9}), Error);
}

TEST_CASE("asymmetric disagreement moves the 1d split") {
  // u(x) = x, d = (-10, 0): product (x+10)(1-x) is decreasing on [0,1]
  const auto sol = nash_maximize_1d([](double x) { return x; },
                                    [](double x) { return 1.0 - x; }, {-10.0, 0.0});
  CHECK(sol.allocation[0] == 0.0);
  CHECK(sol.payoff2 == 1.0);
}

TEST_CASE("orthogonal weights reach the doubling corner") {
  const auto sol = nash_solution_2d(linear_spec(0.5, -1.0), {1.0, 0.0});
  CHECK(sol.allocation[0] == 1.0);
  CHECK(sol.allocation[1] == 0.0);
  CHECK(sol.payoff1 == 1.0);
  CHECK(sol.payoff2 == 1.0);
}

TEST_CASE("equal weights bundle on the diagonal") {
  const auto spec = sqrt_spec(0.25, 0.0);
  const auto sol = nash_solution_2d(spec, {0.5, 0.5});
  const auto one_d = nash_solution_1d(ValueFunction::power(0.5), {0.0, 0.0});
  CHECK(sol.payoff1 == doctest::Approx(one_d.payoff1).epsilon(1e-6));
  CHECK(sol.payoff2 == doctest::Approx(one_d.payoff2).epsilon(1e-6));
}

TEST_CASE("skewed sqrt weights beat the bundled payoffs") {
  const auto spec = sqrt_spec(0.25, 0.0);
  const auto sol = nash_solution_2d(spec, {0.8, 0.2});
  const double bundled = std::sqrt(0.5);
  CHECK(sol.payoff1 > bundled);
  CHECK(sol.payoff2 > bundled);

  // grid oracle confirms the optimum within 1e-4 payoff
  auto u1 = [&](double x1, double x2) { return 0.8 * spec.v1(x1) + 0.2 * spec.v2(x2); };
  auto u2 = [&](double x1, double x2) {
    return 0.2 * spec.v1(1.0 - x1) + 0.8 * spec.v2(1.0 - x2);
  };
  const auto grid = grid_maximize_2d(
      [&](double x1, double x2) {
        const double g1 = u1(x1, x2);
        const double g2 = u2(x1, x2);
        return g1 > 0.0 && g2 > 0.0 ? g1 * g2 : std::min(g1, g2);
      },
      0.0, 1.0, 0.0, 1.0, 2001);
  CHECK(std::abs(u1(sol.allocation[0], sol.allocation[1]) - u1(grid.x, grid.y)) <= 1e-4);
  CHECK(std::abs(u2(sol.allocation[0], sol.allocation[1]) - u2(grid.x, grid.y)) <= 1e-4);
  CHECK(sol.nash_product >= grid.value - 1e-9);
  // the solver may only beat the lattice by the grid's Lipschitz slack
  CHECK(sol.nash_product - grid.value <= 4.0 * grid.step_x);
}

TEST_CASE("solutions are Pareto optimal on the grid") {
  check_pareto_2d(linear_spec(0.5, -1.0), {1.0, 0.0},
                  nash_solution_2d(linear_spec(0.5, -1.0), {1.0, 0.0}));
  check_pareto_2d(sqrt_spec(0.25, 0.0), {0.75, 0.25},
                  nash_solution_2d(sqrt_spec(0.25, 0.0), {0.75, 0.25}));
}

TEST_CASE("symmetric inputs give equal payoffs") {
  for (double w : {0.5, 0.6, 0.9}) {
    // mirrored weights keep the game symmetric across agents
    const auto sol = nash_solution_2d(sqrt_spec(0.4, 0.0), {w, 1.0 - w});
    CHECK(sol.payoff1 == doctest::Approx(sol.payoff2).epsilon(1e-7));
  }
}

TEST_CASE("scale covariance of the Nash solution") {
  const double lambda = 3.5;
  auto u1 = [](double x1, double x2) { return 0.7 * std::sqrt(x1) + 0.3 * std::sqrt(x2); };
  auto u2 = [](double x1, double x2) {
    return 0.4 * std::sqrt(1.0 - x1) + 0.6 * std::sqrt(1.0 - x2);
  };
  const auto base = nash_maximize_2d(u1, u2, {0.0, 0.0});
  const auto scaled = nash_maximize_2d(
      [&](double x1, double x2) { return lambda * u1(x1, x2); }, u2, {0.0, 0.0});
  CHECK(scaled.allocation[0] == doctest::Approx(base.allocation[0]).epsilon(1e-6));
  CHECK(scaled.allocation[1] == doctest::Approx(base.allocation[1]).epsilon(1e-6));
  CHECK(scaled.payoff1 == doctest::Approx(lambda * base.payoff1).epsilon(1e-6));
  CHECK(scaled.payoff2 == doctest::Approx(base.payoff2).epsilon(1e-6));
}

TEST_CASE("bundled diagonal reproduces the 1d solution") {
  const auto spec = sqrt_spec(0.25, 0.0);
  const double w = 0.5;
  const auto diagonal = nash_maximize_1d(
      [&](double x) { return w * spec.v1(x) + (1.0 - w) * spec.v2(x); },
      [&](double x) { return w * spec.v1(1.0 - x) + (1.0 - w) * spec.v2(1.0 - x); },
      {0.0, 0.0});
  const auto one_d = bundled_baseline(spec);
  CHECK(diagonal.payoff1 == doctest::Approx(one_d.payoff1).epsilon(1e-6));
  CHECK(diagonal.allocation[0] == doctest::Approx(one_d.allocation[0]).epsilon(1e-6));
}

TEST_CASE("exhaustive payoffs double under orthogonal linear weights") {
  RngStream rng(51);
  const auto est =
      expected_refined_payoffs(linear_spec(0.5, -1.0), 0, rng, BargainMethod::exhaustive);
  CHECK(est.baseline1 == 0.5);
  CHECK(est.baseline2 == 0.5);
  CHECK(est.mean1 == 1.0);
  CHECK(est.mean2 == 1.0);
  REQUIRE(est.realizations.size() == 2);
  for (const auto& r : est.realizations) {
    CHECK(r.gain1 == 0.5);
    CHECK(r.gain2 == 0.5);
  }
}

TEST_CASE("identical weights leave payoffs at the baseline") {
  RngStream rng(52);
  const auto est =
      expected_refined_payoffs(linear_spec(0.5, 1.0), 0, rng, BargainMethod::exhaustive);
  CHECK(est.mean1 - est.baseline1 == 0.0);
  CHECK(est.mean2 - est.baseline2 == 0.0);
}

TEST_CASE("expansion monotonicity per realization, strict iff weights differ") {
  RngStream rng(53);
  const auto est =
      expected_refined_payoffs(sqrt_spec(0.25, 0.0), 0, rng, BargainMethod::exhaustive);
  REQUIRE(est.realizations.size() == 4);
  for (const auto& r : est.realizations) {
    if (r.w1 == r.w2) {
      CHECK(std::abs(r.gain1) <= 1e-9);
      CHECK(std::abs(r.gain2) <= 1e-9);
    } else {
      CHECK(r.gain1 > 1e-6);
      CHECK(r.gain2 > 1e-6);
    }
  }
}

TEST_CASE("monte carlo agrees with the exhaustive joint") {
  const auto spec = sqrt_spec(0.25, 0.0);
  RngStream rng(54);
  const auto exact = expected_refined_payoffs(spec, 0, rng, BargainMethod::exhaustive);
  const auto mc = expected_refined_payoffs(spec, 10000, rng, BargainMethod::monte_carlo);
  CHECK(std::abs(mc.mean1 - exact.mean1) <= 4.0 * mc.se1);
  CHECK(std::abs(mc.mean2 - exact.mean2) <= 4.0 * mc.se2);
  CHECK(mc.mean1 - exact.baseline1 - 4.0 * mc.se1 > 0.0);
  CHECK(mc.mean2 - exact.baseline2 - 4.0 * mc.se2 > 0.0);
}

TEST_CASE("independent uniform weights give positive gains") {
  BargainingSpec spec = sqrt_spec(0.2, 0.0);
  spec.weights.kind = WeightModel::Kind::independent_uniform;
  RngStream rng(55);
  CHECK_THROWS_AS(expected_refined_payoffs(spec, 0, rng, BargainMethod::exhaustive), Error);
  const auto mc = expected_refined_payoffs(spec, 4000, rng, BargainMethod::monte_carlo);
  CHECK(mc.mean1 - mc.baseline1 - 4.0 * mc.se1 > 0.0);
  CHECK(mc.mean2 - mc.baseline2 - 4.0 * mc.se2 > 0.0);
}

TEST_CASE("correlation sweep matches the closed-form linear gains") {
  const auto rows = correlation_sweep(linear_spec(0.5, 0.0), 0.5, {-1.0, 0.0, 1.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].gain1 == 0.5);
  CHECK(rows[1].gain1 == 0.25);
  CHECK(rows[2].gain1 == 0.0);
  CHECK(rows[0].gain2 == 0.5);
  CHECK(rows[2].gain2 == 0.0);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK(rows[i].gain1 > rows[i + 1].gain1);
    CHECK(rows[i].gain2 > rows[i + 1].gain2);
  }
  CHECK_THROWS_AS(correlation_sweep(linear_spec(0.5, 0.0), 0.5, {0.0, 0.0}), Error);
}

TEST_CASE("value function families validate") {
  CHECK_THROWS_AS(ValueFunction::power(0.0), Error);
  CHECK_THROWS_AS(ValueFunction::power(1.5), Error);
  CHECK_THROWS_AS(ValueFunction::custom_grid({0.0, 0.5, 0.4}), Error);
  CHECK_THROWS_AS(ValueFunction::custom_grid({0.5, 1.0}), Error);
  const auto grid = ValueFunction::custom_grid({0.0, 0.8, 1.0});
  CHECK(grid(0.0) == 0.0);
  CHECK(grid(0.25) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(grid(1.0) == 1.0);

  WeightModel bad;
  bad.kind = WeightModel::Kind::independent_uniform;
  bad.sigma = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}
