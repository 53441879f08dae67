#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refinery/errors.hpp"

namespace refinery {

using AtomId = std::uint64_t;

struct Atom {
  AtomId id = 0;
  std::string label;
};

// A proposition is a set of atom ids; the empty set is bottom.
class Proposition {
 public:
  Proposition() = default;
  explicit Proposition(std::vector<AtomId> ids);
  static Proposition singleton(AtomId id) { return Proposition({id}); }

  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  bool contains(AtomId id) const;
  const std::vector<AtomId>& ids() const { return ids_; }

  bool disjoint_with(const Proposition& other) const;
  Proposition unite(const Proposition& other) const;

  bool operator==(const Proposition& other) const { return ids_ == other.ids_; }

 private:
  std::vector<AtomId> ids_;  // sorted, unique
};

// Finite stage of a Jeffrey-Bolker decision problem: atoms with credence
// and desirability, plus an act partition over the atoms. All operations
// are pure; refinement returns a fresh problem.
class DecisionProblem {
 public:
  DecisionProblem() = default;

  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t act_count() const { return acts_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Proposition>& acts() const { return acts_; }
  const Proposition& act(std::size_t index) const;

  double atom_credence(AtomId id) const;
  double atom_desirability(AtomId id) const;
  const std::string& atom_label(AtomId id) const;

  // Everything (top), as a proposition.
  Proposition top() const;

  // Internal invariants; throws on violation. Cheap enough for tests to
  // call after every operation.
  void check_invariants() const;

  friend DecisionProblem make_problem(const std::vector<std::string>&,
                                      const std::vector<std::vector<std::size_t>>&,
                                      const std::vector<double>&,
                                      const std::vector<double>&);
  friend DecisionProblem refine_binary(const DecisionProblem&, const struct SplitSpec&);
  friend DecisionProblem refine_kary(const DecisionProblem&, std::size_t,
                                     const std::vector<struct KaryBranch>&,
                                     const std::vector<std::string>&);
  friend DecisionProblem add_catch_all(const DecisionProblem&, double, double);

 private:
  std::size_t index_of(AtomId id) const;

  std::vector<Atom> atoms_;
  std::vector<double> credence_;      // parallel to atoms_
  std::vector<double> desirability_;  // parallel to atoms_
  std::vector<Proposition> acts_;
  AtomId next_id_ = 0;
};

// Sampled outcome of a binary refinement: branch utilities and branch
// credences before renormalization.
struct RefinementOutcome {
  double u1 = 0.0;
  double u2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  void validate() const;
  // Post-refinement conditional probability of the first branch.
  double conditional_q() const { return p1 / (p1 + p2); }
};

struct SplitSpec {
  std::size_t target = 0;  // act index to refine
  RefinementOutcome outcome;
  std::string label1 = "b1";
  std::string label2 = "b2";
};

// Builds a validated problem. Groups are index lists into `labels`;
// credences are renormalized to unit mass when the sum is within 1e-9 of 1.
DecisionProblem make_problem(const std::vector<std::string>& labels,
                             const std::vector<std::vector<std::size_t>>& act_groups,
                             const std::vector<double>& credence,
                             const std::vector<double>& desirability);

double probability(const DecisionProblem& problem, const Proposition& x);

// Jeffrey desirability: credence-weighted average of atom desirabilities.
double desirability(const DecisionProblem& problem, const Proposition& x);

double act_probability(const DecisionProblem& problem, std::size_t act_index);
double act_desirability(const DecisionProblem& problem, std::size_t act_index);

// Splits the target act into two fresh acts carrying (u_i, p_i/Z) and
// rescales every untouched credence by 1/Z, Z = 1 - P0(A) + p1 + p2.
DecisionProblem refine_binary(const DecisionProblem& problem, const SplitSpec& spec);

struct KaryBranch {
  double utility = 0.0;
  double mass = 0.0;
};

// k-way replacement of the target act; equivalent to the (k-1)-step chain
// of binary refinements over residuals.
DecisionProblem refine_kary(const DecisionProblem& problem, std::size_t target,
                            const std::vector<KaryBranch>& branches,
                            const std::vector<std::string>& labels);

// Appends a catch-all act with the given mass; prior credences scale by
// (1 - credence). Expanding the option set is then refine_binary on it.
DecisionProblem add_catch_all(const DecisionProblem& problem, double credence,
                              double desirability);

// JSON document { "atoms": [...], "credence": [...], "desirability": [...],
// "acts": [[...]...] }, numbers with 17 significant digits.
std::string problem_to_json(const DecisionProblem& problem);
DecisionProblem problem_from_json(const std::string& text);

}  // namespace refinery
