#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "refinery/oracles.hpp"
#include "refinery/single_agent.hpp"

using namespace refinery;
using refinery::testing::coin_problem;

TEST_CASE("best_act picks the lowest-index argmax") {
  const auto p = make_problem({"a", "b", "c"}, {{0}, {1}, {2}},
                              {0.25, 0.25, 0.5}, {1.0, 3.0, 2.0});
  const auto [idx, value] = best_act(p);
  CHECK(idx == 1);
  CHECK(value == 3.0);

  const auto tie = make_problem({"a", "b"}, {{0}, {1}}, {0.5, 0.5}, {2.0, 2.0});
  CHECK(best_act(tie).first == 0);

  const auto single = make_problem({"a"}, {{0}}, {1.0}, {4.0});
  CHECK(best_act(single).first == 0);
}

TEST_CASE("degenerate model yields zero gain exactly") {
  const auto p = coin_problem();
  const auto model = make_model(0.0, 0.5, DistSpec::point(0.5), DistSpec::point(0.0));
  RngStream rng(17);
  const auto gain = value_of_refinement(p, 0, model, 2000, rng);
  CHECK(gain.v0 == 0.0);
  CHECK(gain.v1_mean == 0.0);
  CHECK(gain.std_error == 0.0);
}

TEST_CASE("two-point model gain matches the hand enumeration") {
  // branches (1,-1) or (-1,1); V1 = max{1, -1, -1} = 1 in both
  const auto p = coin_problem();
  const auto model = make_model(0.0, 0.5, DistSpec::point(0.5), DistSpec::two_point_sym(2.0));
  RngStream rng(18);
  const auto gain = value_of_refinement(p, 0, model, 5000, rng);
  CHECK(gain.v0 == 0.0);
  CHECK(gain.v1_mean == 1.0);
  CHECK(gain.std_error == 0.0);
}

TEST_CASE("asymmetric two-point model agrees with the exhaustive oracle") {
  const auto p = coin_problem();
  const auto model = make_model(0.0, 0.5, DistSpec::point(0.3), DistSpec::two_point_sym(2.0));
  DiscreteOutcomeSpace<double> deltas;
  deltas.outcomes = {{0.5, 2.0}, {0.5, -2.0}};
  const double exact = exact_expectation(deltas, [&](double delta) {
    const double u1 = 0.0 + 0.7 * delta;
    const double u2 = 0.0 - 0.3 * delta;
    return std::max({u1, u2, -1.0});
  });
  CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));

  RngStream rng(19);
  const std::size_t n = 100000;
  const auto gain = value_of_refinement(p, 0, model, n, rng);
  CHECK(std::abs(gain.v1_mean - exact) <= 4.0 * gain.std_error + 1e-12);
}

TEST_CASE("uniform spread matches the closed-form integral") {
  // E[max{u1,u2}] = 0.5 * E|delta| = 0.25 for delta ~ U(-1,1), q = 1/2
  const auto p = coin_problem();
  const auto model = make_model(0.0, 0.5, DistSpec::point(0.5), DistSpec::uniform(-1.0, 1.0));
  RngStream rng(20);
  const auto gain = value_of_refinement(p, 0, model, 100000, rng);
  CHECK(std::abs(gain.v1_mean - 0.25) <= 4.0 * gain.std_error);
  CHECK(gain.gain() > 0.0);
}

TEST_CASE("probability-weighted criterion scales by branch mass") {
  const auto p = coin_problem();
  const auto model = make_model(0.0, 0.5, DistSpec::point(0.5), DistSpec::two_point_sym(2.0));
  RngStream rng(21);
  const auto gain =
      value_of_refinement(p, 0, model, 2000, rng, GainCriterion::probability_weighted);
  // V0 = max(0.5*0, 0.5*-1) = 0; every sample: max(0.25*1, 0.25*-1, -0.5) = 0.25
  CHECK(gain.v0 == 0.0);
  CHECK(gain.v1_mean == 0.25);
}

TEST_CASE("model anchored elsewhere is rejected") {
  const auto p = coin_problem();
  const auto model = make_model(1.0, 0.5, DistSpec::point(0.5), DistSpec::point(0.0));
  RngStream rng(22);
  CHECK_THROWS_AS(value_of_refinement(p, 0, model, 10, rng), Error);
}

TEST_CASE("pointwise dominance of the branch maximum") {
  for (const auto& [name, model] : builtin_model_battery(0.3, 0.4)) {
    RngStream rng(23);
    for (int i = 0; i < 500; ++i) {
      const auto o = sample_outcome(model, rng.sub(i));
      const double q = o.conditional_q();
      const double convex = q * o.u1 + (1.0 - q) * o.u2;
      const double top = std::max(o.u1, o.u2);
      INFO(name);
      CHECK(top >= convex - 1e-15 * std::max({1.0, std::abs(o.u1), std::abs(o.u2)}));
      if (std::abs(o.u1 - o.u2) > 1e-12) CHECK(top > convex);
    }
  }
}

TEST_CASE("refinement gain is positive for every uncertain builtin model") {
  const auto p = coin_problem();
  RngStream rng(24);
  std::size_t idx = 0;
  for (const auto& [name, model] : builtin_model_battery(0.0, 0.5)) {
    ++idx;
    const double uncertainty = check_uncertainty(model, 2000, rng.sub(1000 + idx));
    const auto gain = value_of_refinement(p, 0, model, 20000, rng.sub(idx));
    INFO(name);
    if (uncertainty > 0.0) {
      // 99% CI excludes zero from below
      CHECK(gain.gain() - 2.5758293035489004 * gain.std_error > 0.0);
    } else {
      CHECK(gain.gain() == 0.0);
    }
  }
}

TEST_CASE("sequential refinement with one stage reduces to value_of_refinement") {
  const auto p = coin_problem();
  StageSpec stage;
  stage.model.q_dist = DistSpec::point(0.5);
  stage.model.spread_dist = DistSpec::two_point_sym(2.0);
  RngStream rng(25);
  const auto chain = sequential_refinement(p, {stage}, 2000, rng);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0].v0 == 0.0);
  CHECK(chain[0].v1_mean == 1.0);  // deterministic optimum, see two-point test
}

TEST_CASE("degenerate schedule gives a flat chain") {
  const auto p = coin_problem();
  StageSpec stage;  // spread defaults to point(0)
  RngStream rng(26);
  const auto chain = sequential_refinement(p, {stage, stage, stage}, 500, rng);
  REQUIRE(chain.size() == 3);
  for (const auto& g : chain) {
    CHECK(g.v1_mean == 0.0);
    CHECK(g.std_error == 0.0);
  }
}

TEST_CASE("two-stage two-point chain strictly increases") {
  const auto p = coin_problem();
  StageSpec wide;
  wide.model.spread_dist = DistSpec::two_point_sym(2.0);
  StageSpec narrow;
  narrow.model.spread_dist = DistSpec::two_point_sym(1.0);
  RngStream rng(27);
  const auto chain = sequential_refinement(p, {wide, narrow}, 4000, rng);
  REQUIRE(chain.size() == 2);

  // exhaustive 4-path oracle: stage-1 branches (+-2), stage-2 (+-1) on the
  // realized best act (utility 1, credence 1/4)
  struct Path {
    double d1;
    double d2;
  };
  DiscreteOutcomeSpace<Path> paths;
  paths.outcomes = {{0.25, {2.0, 1.0}},
                    {0.25, {2.0, -1.0}},
                    {0.25, {-2.0, 1.0}},
                    {0.25, {-2.0, -1.0}}};
  const double exact_v1 = exact_expectation(paths, [](const Path& path) {
    const double u1 = 0.5 * path.d1;
    const double u2 = -0.5 * path.d1;
    return std::max({u1, u2, -1.0});
  });
  const double exact_v2 = exact_expectation(paths, [](const Path& path) {
    const double stage1_best = std::max(0.5 * path.d1, -0.5 * path.d1);
    const double stage1_rest = std::max(-0.5 * std::abs(path.d1), -1.0);
    const double u1 = stage1_best + 0.5 * path.d2;
    const double u2 = stage1_best - 0.5 * path.d2;
    return std::max({u1, u2, stage1_rest});
  });
  CHECK(exact_v1 == 1.0);
  CHECK(exact_v2 == 1.5);
  CHECK(chain[0].v1_mean == exact_v1);
  CHECK(chain[1].v1_mean == exact_v2);
  CHECK(chain[0].v0 < chain[0].v1_mean);
  CHECK(chain[1].v0 < chain[1].v1_mean);
}

TEST_CASE("two-point q times two-point spread matches the 4-outcome oracle") {
  const auto p = coin_problem();
  const auto model =
      make_model(0.0, 0.5, DistSpec::two_point(0.25, 0.75), DistSpec::two_point_sym(2.0));
  struct Combo {
    double q;
    double delta;
  };
  DiscreteOutcomeSpace<Combo> combos;
  combos.outcomes = {{0.25, {0.25, 2.0}},
                     {0.25, {0.25, -2.0}},
                     {0.25, {0.75, 2.0}},
                     {0.25, {0.75, -2.0}}};
  const double exact = exact_expectation(combos, [](const Combo& c) {
    const double u1 = (1.0 - c.q) * c.delta;
    const double u2 = -c.q * c.delta;
    return std::max({u1, u2, -1.0});
  });
  RngStream rng(30);
  const auto gain = value_of_refinement(p, 0, model, 50000, rng);
  CHECK(std::abs(gain.v1_mean - exact) <= 4.0 * gain.std_error + 1e-12);
}

TEST_CASE("continuous chain means are CI-separated") {
  const auto p = coin_problem();
  StageSpec first, second;
  first.model.spread_dist = DistSpec::uniform(-2.0, 2.0);
  second.model.spread_dist = DistSpec::uniform(-1.0, 1.0);
  RngStream rng(28);
  const auto chain = sequential_refinement(p, {first, second}, 20000, rng);
  REQUIRE(chain.size() == 2);
  const double z99 = 2.5758293035489004;
  CHECK(chain[0].v1_mean - z99 * chain[0].std_error > 0.0);
  CHECK(chain[1].v1_mean - chain[0].v1_mean >
        z99 * (chain[0].std_error + chain[1].std_error));
}

TEST_CASE("optimal stopping formula cases") {
  const auto plan = optimal_stopping({1.0, 0.5, 0.25}, 0.3);
  REQUIRE(plan.t_star.has_value());
  CHECK(*plan.t_star == 1);
  CHECK(plan.net_gain == doctest::Approx(0.9).epsilon(1e-12));
  REQUIRE(plan.per_step.size() == 3);
  CHECK(plan.per_step[0].net == doctest::Approx(0.7).epsilon(1e-12));

  const auto never = optimal_stopping({1.0, 0.5}, 1.5);
  CHECK(never.never());
  CHECK(never.net_gain == 0.0);

  const auto boundary = optimal_stopping({1.0, 0.4}, 1.0);
  REQUIRE(boundary.t_star.has_value());
  CHECK(*boundary.t_star == 0);
  CHECK(boundary.net_gain == 0.0);

  CHECK_THROWS_AS(optimal_stopping({0.5, 0.6}, 0.1), Error);
  CHECK_THROWS_AS(optimal_stopping({0.5, -0.1}, 0.1), Error);
  CHECK_THROWS_AS(optimal_stopping({0.5}, 0.0), Error);
}

TEST_CASE("stopping plan is optimal against brute force") {
  RngStream rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    RngStream sub = rng.sub(trial);
    const std::size_t len = 1 + sub.next_u64() % 8;
    std::vector<double> deltas;
    double current = sub.uniform(0.5, 3.0);
    for (std::size_t i = 0; i < len; ++i) {
      deltas.push_back(current);
      current *= sub.uniform(0.3, 0.9);
    }
    const double cost = sub.uniform(0.05, 3.0);
    const auto plan = optimal_stopping(deltas, cost);

    // brute force over all stopping times, "never" included
    double best = 0.0;
    std::optional<std::size_t> best_t;
    double running = 0.0;
    for (std::size_t t = 0; t < deltas.size(); ++t) {
      running += deltas[t] - cost;
      if (running > best) {
        best = running;
        best_t = t;
      }
    }
    CHECK(plan.net_gain == doctest::Approx(best).epsilon(1e-12));
    CHECK(plan.net_gain >= 0.0);
    if (cost < deltas[0]) CHECK(plan.net_gain > 0.0);
    if (best_t.has_value() && plan.t_star.has_value()) {
      // equal net gain; boundary ties (delta == cost) may differ in index
      CHECK(plan.net_gain == doctest::Approx(best).epsilon(1e-12));
    }
  }
}
