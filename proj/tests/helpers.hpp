#pragma once

#include <string>
#include <vector>

#include "refinery/algebra.hpp"
#include "refinery/random.hpp"

namespace refinery::testing {

// Two-act base problem with V0 = 0: act "a" (U 0, P 1/2) and act "b"
// (U -1, P 1/2).
inline DecisionProblem coin_problem() {
  return make_problem({"a", "b"}, {{0}, {1}}, {0.5, 0.5}, {0.0, -1.0});
}

inline DecisionProblem random_problem(RngStream& rng, std::size_t max_atoms = 8) {
  const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % (max_atoms - 1));
  std::vector<std::string> labels;
  std::vector<double> credence;
  std::vector<double> desirability;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("atom" + std::to_string(i));
    credence.push_back(rng.uniform(0.05, 1.0));
    mass += credence.back();
    desirability.push_back(rng.uniform(-5.0, 5.0));
  }
  for (double& c : credence) c /= mass;
  // random ordered partition of the atom indices
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.next_u64() % i]);
  }
  const std::size_t act_count = 1 + static_cast<std::size_t>(rng.next_u64() % n);
  std::vector<std::vector<std::size_t>> groups(act_count);
  for (std::size_t i = 0; i < n; ++i) groups[i % act_count].push_back(order[i]);
  return make_problem(labels, groups, credence, desirability);
}

// Residual-splitting chain of binary refinements; the independent route
// that refine_kary must reproduce.
inline DecisionProblem chain_refine_kary(const DecisionProblem& problem, std::size_t target,
                                         const std::vector<KaryBranch>& branches,
                                         const std::vector<std::string>& labels) {
  const std::size_t k = branches.size();
  double total = 0.0;
  for (const KaryBranch& b : branches) total += b.mass;
  const double p0 = act_probability(problem, target);
  const double z1 = 1.0 - p0 + total;

  DecisionProblem current = problem;
  std::size_t residual = target;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    SplitSpec split;
    split.target = residual;
    split.label1 = labels[j];
    const bool last = (j + 2 == k);
    double remaining_mass = 0.0;
    double remaining_weighted = 0.0;
    for (std::size_t i = j + 1; i < k; ++i) {
      remaining_mass += branches[i].mass;
      remaining_weighted += branches[i].mass * branches[i].utility;
    }
    if (j == 0) {
      split.outcome.p1 = branches[0].mass;
      split.outcome.p2 = remaining_mass;
    } else {
      const double r = act_probability(current, residual);
      split.outcome.p1 = branches[j].mass / z1;
      split.outcome.p2 = r - split.outcome.p1;
    }
    split.outcome.u1 = branches[j].utility;
    if (last) {
      split.label2 = labels[j + 1];
      split.outcome.u2 = branches[j + 1].utility;
    } else {
      split.label2 = "residual" + std::to_string(j);
      split.outcome.u2 = remaining_weighted / remaining_mass;
    }
    current = refine_binary(current, split);
    residual = split.target + 1;
  }
  return current;
}

}  // namespace refinery::testing
