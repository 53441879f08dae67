#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "refinery/algebra.hpp"

using namespace refinery;
using refinery::testing::chain_refine_kary;
using refinery::testing::coin_problem;
using refinery::testing::random_problem;

namespace {

void check_error(Errc expected, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected error ", errc_name(expected));
  } catch (const Error& e) {
    CHECK(e.code() == expected);
  }
}

}  // namespace

TEST_CASE("make_problem validates and builds") {
  const auto p = make_problem({"a", "b"}, {{0}, {1}}, {0.5, 0.5}, {1.0, -1.0});
  CHECK(p.atom_count() == 2);
  CHECK(p.act_count() == 2);
  CHECK(act_desirability(p, 0) == 1.0);
  CHECK(act_desirability(p, 1) == -1.0);

  check_error(Errc::overlapping_acts, [] {
    make_problem({"a", "b"}, {{0}, {0, 1}}, {0.5, 0.5}, {0.0, 0.0});
  });
  check_error(Errc::incomplete_cover, [] {
    make_problem({"a", "b"}, {{0}}, {0.5, 0.5}, {0.0, 0.0});
  });
  check_error(Errc::negative_credence, [] {
    make_problem({"a", "b"}, {{0}, {1}}, {-0.1, 1.1}, {0.0, 0.0});
  });
  // mass 0.6 is rejected by the sum check
  check_error(Errc::length_mismatch, [] {
    make_problem({"a", "b"}, {{0}, {1}}, {0.3, 0.3}, {0.0, 0.0});
  });
  check_error(Errc::length_mismatch, [] {
    make_problem({"a", "b"}, {{0}, {1}}, {0.5, 0.5}, {0.0});
  });
}

TEST_CASE("probability is additive and normalized") {
  const auto p = make_problem({"x", "y"}, {{0}, {1}}, {0.3, 0.7}, {1.0, 2.0});
  CHECK(probability(p, p.top()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probability(p, Proposition{}) == 0.0);
  CHECK(probability(p, p.act(0)) == doctest::Approx(0.3).epsilon(1e-12));
  check_error(Errc::unknown_atom, [&] { probability(p, Proposition::singleton(99)); });
}

TEST_CASE("desirability averages by credence") {
  const auto single = make_problem({"x"}, {{0}}, {1.0}, {4.0});
  CHECK(desirability(single, single.top()) == 4.0);

  const auto even = make_problem({"x", "y"}, {{0}, {1}}, {0.5, 0.5}, {2.0, 0.0});
  CHECK(desirability(even, even.top()) == doctest::Approx(1.0).epsilon(1e-12));

  // hand-evaluated weighted average: 0.25*4 + 0.75*0 = 1
  const auto skew = make_problem({"x", "y"}, {{0}, {1}}, {0.25, 0.75}, {4.0, 0.0});
  CHECK(desirability(skew, skew.top()) == doctest::Approx(1.0).epsilon(1e-12));

  check_error(Errc::bottom_proposition, [&] { desirability(even, Proposition{}); });
  const auto null_atom = make_problem({"x", "y"}, {{0}, {1}}, {1.0, 0.0}, {1.0, 2.0});
  check_error(Errc::null_probability,
              [&] { desirability(null_atom, null_atom.act(1)); });
}

TEST_CASE("probability is additive over disjoint propositions") {
  RngStream rng(1717);
  for (int trial = 0; trial < 200; ++trial) {
    RngStream sub = rng.sub(trial);
    const auto p = random_problem(sub);
    std::vector<AtomId> left, right;
    for (std::size_t i = 0; i < p.atom_count(); ++i) {
      if (sub.bernoulli(0.5)) left.push_back(p.atoms()[i].id);
      else right.push_back(p.atoms()[i].id);
    }
    const Proposition x(left), y(right);
    REQUIRE(x.disjoint_with(y));
    CHECK(probability(p, x.unite(y)) ==
          doctest::Approx(probability(p, x) + probability(p, y)).epsilon(1e-12));
  }
}

TEST_CASE("averaging identity on random disjoint propositions") {
  RngStream rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    RngStream sub = rng.sub(trial);
    const auto p = random_problem(sub);
    // split the atom set into two halves
    std::vector<AtomId> left, right;
    for (std::size_t i = 0; i < p.atom_count(); ++i) {
      (i % 2 == 0 ? left : right).push_back(p.atoms()[i].id);
    }
    const Proposition x(left), y(right);
    if (x.empty() || y.empty()) continue;
    if (probability(p, x) == 0.0 || probability(p, y) == 0.0) continue;
    const double lhs = desirability(p, x.unite(y));
    const double rhs = (probability(p, x) * desirability(p, x) +
                        probability(p, y) * desirability(p, y)) /
                       (probability(p, x) + probability(p, y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("refine_binary mass-preserving split") {
  const auto p = coin_problem();
  SplitSpec split;
  split.target = 0;
  split.outcome = {2.0, 0.0, 0.25, 0.25};
  const auto refined = refine_binary(p, split);
  CHECK(refined.act_count() == 3);
  CHECK(act_probability(refined, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(act_probability(refined, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(act_desirability(refined, 0) == 2.0);
  CHECK(act_desirability(refined, 1) == 0.0);
  // untouched act keeps its mass when Z = 1
  CHECK(act_probability(refined, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("refine_binary renormalizes when mass moves") {
  // Z = 1 - 0.5 + 0.6 = 1.1
  const auto p = coin_problem();
  SplitSpec split;
  split.target = 0;
  split.outcome = {1.0, 1.0, 0.3, 0.3};
  const auto refined = refine_binary(p, split);
  CHECK(act_probability(refined, 0) == doctest::Approx(0.3 / 1.1).epsilon(1e-12));
  CHECK(act_probability(refined, 1) == doctest::Approx(0.3 / 1.1).epsilon(1e-12));
  CHECK(act_probability(refined, 2) == doctest::Approx(0.5 / 1.1).epsilon(1e-12));
  CHECK(probability(refined, refined.top()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("refine_binary rejects bad outcomes") {
  const auto p = coin_problem();
  SplitSpec split;
  split.target = 0;
  split.outcome = {0.0, 0.0, 0.6, 0.6};
  check_error(Errc::outcome_mass_out_of_range, [&] { refine_binary(p, split); });
  split.outcome = {0.0, 0.0, 0.25, 0.25};
  split.target = 5;
  check_error(Errc::invalid_target, [&] { refine_binary(p, split); });
}

TEST_CASE("refine_kary base case matches refine_binary") {
  const auto p = coin_problem();
  const auto via_kary = refine_kary(p, 0, {{2.0, 0.2}, {-1.0, 0.3}}, {"b1", "b2"});
  SplitSpec split;
  split.target = 0;
  split.outcome = {2.0, -1.0, 0.2, 0.3};
  split.label1 = "b1";
  split.label2 = "b2";
  const auto via_binary = refine_binary(p, split);
  REQUIRE(via_kary.act_count() == via_binary.act_count());
  for (std::size_t a = 0; a < via_kary.act_count(); ++a) {
    CHECK(act_probability(via_kary, a) ==
          doctest::Approx(act_probability(via_binary, a)).epsilon(1e-12));
    CHECK(act_desirability(via_kary, a) ==
          doctest::Approx(act_desirability(via_binary, a)).epsilon(1e-12));
  }
}

TEST_CASE("refine_kary equal thirds") {
  const auto p = make_problem({"a", "b"}, {{0}, {1}}, {0.6, 0.4}, {1.0, 0.0});
  const auto refined =
      refine_kary(p, 0, {{1.0, 0.2}, {2.0, 0.2}, {3.0, 0.2}}, {"t1", "t2", "t3"});
  CHECK(refined.act_count() == 4);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(act_probability(refined, a) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(act_desirability(refined, a) == doctest::Approx(1.0 + a).epsilon(1e-12));
  }
  CHECK(act_probability(refined, 3) == doctest::Approx(0.4).epsilon(1e-12));

  check_error(Errc::bad_argument, [&] { refine_kary(p, 0, {{1.0, 0.2}}, {"only"}); });
}

TEST_CASE("refine_kary equals the binary residual chain") {
  RngStream rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream sub = rng.sub(trial);
    const auto p = random_problem(sub);
    const std::size_t target = sub.next_u64() % p.act_count();
    const std::size_t k = 2 + sub.next_u64() % 5;
    const double total = sub.uniform(0.05, 0.95);
    std::vector<KaryBranch> branches;
    std::vector<std::string> labels;
    std::vector<double> raw;
    double raw_total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      raw.push_back(sub.uniform(0.1, 1.0));
      raw_total += raw.back();
    }
    for (std::size_t j = 0; j < k; ++j) {
      branches.push_back({sub.uniform(-3.0, 3.0), total * raw[j] / raw_total});
      labels.push_back("branch" + std::to_string(j));
    }
    const auto direct = refine_kary(p, target, branches, labels);
    const auto chained = chain_refine_kary(p, target, branches, labels);
    REQUIRE(direct.act_count() == chained.act_count());
    // label-matched comparison of (credence, desirability) per act
    for (std::size_t a = 0; a < direct.act_count(); ++a) {
      CHECK(act_probability(direct, a) ==
            doctest::Approx(act_probability(chained, a)).epsilon(1e-12));
      CHECK(act_desirability(direct, a) ==
            doctest::Approx(act_desirability(chained, a)).epsilon(1e-12));
      if (direct.act(a).size() == 1 && chained.act(a).size() == 1) {
        CHECK(direct.atom_label(direct.act(a).ids()[0]) ==
              chained.atom_label(chained.act(a).ids()[0]));
      }
    }
  }
}

TEST_CASE("add_catch_all rescales and composes with refinement") {
  const auto p = coin_problem();
  check_error(Errc::mass_out_of_range, [&] { add_catch_all(p, 0.0, 1.0); });

  const auto with_ca = add_catch_all(p, 0.1, 0.25);
  CHECK(with_ca.act_count() == 3);
  CHECK(act_probability(with_ca, 0) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(act_probability(with_ca, 1) == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(act_probability(with_ca, 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(probability(with_ca, with_ca.top()) == doctest::Approx(1.0).epsilon(1e-12));

  SplitSpec split;
  split.target = 2;
  split.outcome = {1.0, -1.0, 0.05, 0.05};
  const auto expanded = refine_binary(with_ca, split);
  CHECK(expanded.act_count() == 4);
}

TEST_CASE("random refinement sequences preserve the partition and mass") {
  RngStream rng(4242);
  for (int trial = 0; trial < 500; ++trial) {
    RngStream sub = rng.sub(trial);
    auto p = random_problem(sub);
    for (int step = 0; step < 5; ++step) {
      const std::size_t prior_acts = p.act_count();
      const auto kind = sub.next_u64() % 3;
      if (kind == 0) {
        SplitSpec split;
        split.target = sub.next_u64() % p.act_count();
        const double mass = sub.uniform(0.05, 0.9);
        const double q = sub.uniform(0.1, 0.9);
        split.outcome = {sub.uniform(-3.0, 3.0), sub.uniform(-3.0, 3.0), q * mass,
                         (1.0 - q) * mass};
        p = refine_binary(p, split);
        CHECK(p.act_count() == prior_acts + 1);
      } else if (kind == 1) {
        const std::size_t k = 2 + sub.next_u64() % 3;
        std::vector<KaryBranch> branches;
        std::vector<std::string> labels;
        const double total = sub.uniform(0.1, 0.9);
        for (std::size_t j = 0; j < k; ++j) {
          branches.push_back({sub.uniform(-3.0, 3.0), total / static_cast<double>(k)});
          labels.push_back("s" + std::to_string(step) + "b" + std::to_string(j));
        }
        p = refine_kary(p, sub.next_u64() % p.act_count(), branches, labels);
        CHECK(p.act_count() == prior_acts + k - 1);
      } else {
        p = add_catch_all(p, sub.uniform(0.05, 0.5), sub.uniform(-2.0, 2.0));
        CHECK(p.act_count() == prior_acts + 1);
      }
      // partition + unit mass invariants
      p.check_invariants();
      CHECK(probability(p, p.top()) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("problem JSON round-trip") {
  const auto p = make_problem({"north", "south", "sea"}, {{0, 2}, {1}}, {0.25, 0.5, 0.25},
                              {1.5, -0.5, 2.0});
  const std::string text = problem_to_json(p);
  CHECK(text.find("\"atoms\":") != std::string::npos);
  // field order is pinned
  CHECK(text.find("\"atoms\"") < text.find("\"credence\""));
  CHECK(text.find("\"credence\"") < text.find("\"desirability\""));
  CHECK(text.find("\"desirability\"") < text.find("\"acts\""));
  const auto back = problem_from_json(text);
  REQUIRE(back.atom_count() == p.atom_count());
  REQUIRE(back.act_count() == p.act_count());
  for (std::size_t a = 0; a < p.act_count(); ++a) {
    CHECK(act_probability(back, a) == act_probability(p, a));
    CHECK(act_desirability(back, a) == act_desirability(p, a));
  }
  CHECK(problem_to_json(back) == text);
  check_error(Errc::bad_argument, [] { problem_from_json("{not json"); });
}
