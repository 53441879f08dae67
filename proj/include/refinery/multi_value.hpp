#pragma once

#include <span>
#include <vector>

#include "refinery/algebra.hpp"
#include "refinery/dist.hpp"
#include "refinery/random.hpp"

namespace refinery {

// k >= 2 per-atom value dimensions over a shared decision-problem skeleton.
struct ValueProfile {
  DecisionProblem problem;
  std::vector<std::vector<double>> values;  // values[dim] parallel to atoms

  std::size_t dims() const { return values.size(); }
  void validate() const;
  // Credence-weighted act value on one dimension.
  double act_value(std::size_t dim, std::size_t act_index) const;
};

ValueProfile make_profile(DecisionProblem problem, std::vector<std::vector<double>> values);

std::string profile_to_json(const ValueProfile& profile);
ValueProfile profile_from_json(const std::string& text);

enum class JointCoupling { independent, common_spread, explicit_joint };

// One sampled joint refinement outcome: a shared split probability and a
// (v1, v2) branch-value pair per dimension.
struct JointOutcome {
  double q = 0.5;
  std::vector<std::pair<double, double>> branch_values;  // per dimension
};

// Distribution over joint refinement outcomes of a single act across all
// value dimensions. One physical split drives every dimension, so q is
// shared; per-dimension spreads may be independent, common, or replaced by
// an explicit finite joint.
struct JointRefinementModel {
  std::vector<double> u0;  // per-dimension act values V_i(A)
  double p0 = 0.5;
  DistSpec q_dist = DistSpec::point(0.5);
  std::vector<DistSpec> spreads;  // per dimension; common_spread uses spreads[0]
  JointCoupling coupling = JointCoupling::independent;
  // explicit_joint: probability plus per-dimension (v1, v2) values.
  std::vector<std::pair<double, std::vector<std::pair<double, double>>>> outcomes;

  void validate() const;
};

JointOutcome sample_joint(const JointRefinementModel& model, RngStream stream);

// k=2: dim 1 favors actA while dim 2 favors actNotA. For k>2, neither act
// weakly dominates the other across all dimensions.
bool detect_dilemma(const ValueProfile& profile, std::size_t actA, std::size_t actNotA);

// Weakly better than every member of `others` on every dimension, strictly
// better on at least one.
bool multi_value_dominates(std::size_t candidate, std::span<const std::size_t> others,
                           const ValueProfile& profile);

struct ResolutionEstimate {
  double prob = 0.0;
  double std_error = 0.0;
};

// Fraction of sampled refinements in which one refined branch multi-value
// dominates { the other branch, actNotA }. Requires an actual dilemma.
ResolutionEstimate resolution_probability(const ValueProfile& profile, std::size_t actA,
                                          std::size_t actNotA,
                                          const JointRefinementModel& joint, std::size_t n,
                                          const RngStream& stream);

// Classification of a single joint outcome; used by the Monte Carlo loop,
// the exhaustive oracle, and the disjointness assertions.
enum class DominanceEvent { none, branch1, branch2 };
DominanceEvent classify_joint_outcome(const JointOutcome& outcome,
                                      std::span<const double> rival_values);

std::string joint_to_json(const JointRefinementModel& model);
JointRefinementModel joint_from_json(const std::string& text);

double aggregate_utility(std::span<const double> values, std::span<const double> weights);

}  // namespace refinery
