#pragma once

#include <optional>
#include <vector>

#include "refinery/algebra.hpp"
#include "refinery/refinement.hpp"

namespace refinery {

enum class GainCriterion {
  utility,              // V = max_A U(A)
  probability_weighted  // V = max_A P(A)*U(A)
};

struct RefinementGain {
  double v0 = 0.0;       // pre-refinement optimum
  double v1_mean = 0.0;  // Monte Carlo estimate of the post-refinement optimum
  double std_error = 0.0;
  std::size_t n = 0;

  double gain() const { return v1_mean - v0; }
};

// Lowest-index act maximizing desirability.
std::pair<std::size_t, double> best_act(const DecisionProblem& problem);

// Optimum under a criterion (used for v0 and by tests).
double optimum_value(const DecisionProblem& problem, GainCriterion criterion);

// Monte Carlo estimate of the expected post-refinement optimum when `act`
// is split under `model`. Each sample applies refine_binary and takes the
// optimum over the refined partition. The model must be anchored at the
// act's current (u0, p0) within 1e-9.
RefinementGain value_of_refinement(const DecisionProblem& problem, std::size_t act,
                                   const RefinementModel& model, std::size_t n,
                                   const RngStream& stream,
                                   GainCriterion criterion = GainCriterion::utility);

// Distributions for one stage of a refinement chain; (u0, p0) are filled in
// from the act chosen at that stage.
struct ModelTemplate {
  DistSpec q_dist = DistSpec::point(0.5);
  DistSpec spread_dist = DistSpec::point(0.0);
  std::optional<DistSpec> mass_dist;  // default: point at the act's p0
  ReflectionMode mode = ReflectionMode::per_sample;

  RefinementModel instantiate(double u0, double p0) const;
};

enum class ActSelectionRule { best_act };

struct StageSpec {
  ActSelectionRule rule = ActSelectionRule::best_act;
  ModelTemplate model;
};

// Simulates n_paths independent refinement chains. Path i, stage j draws
// from stream.sub(i).sub(j); stage j's estimate is the mean over paths of
// the optimum after j+1 refinements (utility criterion). Stage j reports
// v0 = previous stage's mean (stage 0: the exact pre-refinement optimum).
std::vector<RefinementGain> sequential_refinement(const DecisionProblem& problem,
                                                  const std::vector<StageSpec>& schedule,
                                                  std::size_t n_paths,
                                                  const RngStream& stream);

struct StepGain {
  double delta = 0.0;
  double net = 0.0;  // delta - cost
};

struct StoppingPlan {
  // Stop index; empty means never refine.
  std::optional<std::size_t> t_star;
  double net_gain = 0.0;
  std::vector<StepGain> per_step;

  bool never() const { return !t_star.has_value(); }
};

// Fixed-cost stopping rule over a vanishing-returns gain sequence:
// never refine when cost > deltas[0], else stop at the last index with
// delta >= cost. Validates strict decrease and nonnegativity.
StoppingPlan optimal_stopping(const std::vector<double>& deltas, double cost);

}  // namespace refinery
