#include "refinery/single_agent.hpp"

#include <cmath>
#include <string>

#include "refinery/parallel.hpp"

namespace refinery {

namespace {
constexpr double kAnchorTol = 1e-9;
}

std::pair<std::size_t, double> best_act(const DecisionProblem& problem) {
  std::size_t best = 0;
  double best_value = act_desirability(problem, 0);
  for (std::size_t i = 1; i < problem.act_count(); ++i) {
    const double value = act_desirability(problem, i);
    if (value > best_value) {
      best = i;
      best_value = value;
    }
  }
  return {best, best_value};
}

double optimum_value(const DecisionProblem& problem, GainCriterion criterion) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < problem.act_count(); ++i) {
    const double u = act_desirability(problem, i);
    const double v = criterion == GainCriterion::utility ? u : act_probability(problem, i) * u;
    best = std::max(best, v);
  }
  return best;
}

RefinementGain value_of_refinement(const DecisionProblem& problem, std::size_t act,
                                   const RefinementModel& model, std::size_t n,
                                   const RngStream& stream, GainCriterion criterion) {
  require(n >= 1, Errc::bad_argument, "need n >= 1 samples");
  model.validate();
  const double u0 = act_desirability(problem, act);
  const double p0 = act_probability(problem, act);
  require(std::abs(model.u0 - u0) <= kAnchorTol && std::abs(model.p0 - p0) <= kAnchorTol,
          Errc::model_mismatch,
          "model anchored at (u0=" + std::to_string(model.u0) + ", p0=" +
              std::to_string(model.p0) + ") but act has (u=" + std::to_string(u0) +
              ", p=" + std::to_string(p0) + ")");

  std::vector<double> values;
  parallel_fill(n, values, [&](std::size_t i) {
    SplitSpec split;
    split.target = act;
    split.outcome = sample_outcome(model, stream.sub(i));
    const DecisionProblem refined = refine_binary(problem, split);
    return optimum_value(refined, criterion);
  });
  const MeanStdError stats = mean_std_error(values);
  RefinementGain gain;
  gain.v0 = optimum_value(problem, criterion);
  gain.v1_mean = stats.mean;
  gain.std_error = stats.std_error;
  gain.n = n;
  return gain;
}

RefinementModel ModelTemplate::instantiate(double u0, double p0) const {
  return mass_dist ? make_model(u0, p0, q_dist, spread_dist, *mass_dist, mode)
                   : make_model(u0, p0, q_dist, spread_dist, mode);
}

std::vector<RefinementGain> sequential_refinement(const DecisionProblem& problem,
                                                  const std::vector<StageSpec>& schedule,
                                                  std::size_t n_paths,
                                                  const RngStream& stream) {
  require(!schedule.empty(), Errc::bad_argument, "empty refinement schedule");
  require(n_paths >= 1, Errc::bad_argument, "need at least one path");
  const std::size_t stages = schedule.size();

  // values[j][i] = optimum after stage j on path i
  std::vector<std::vector<double>> values(stages, std::vector<double>(n_paths));
  std::vector<double> scratch;
  parallel_fill(n_paths, scratch, [&](std::size_t path) {
    RngStream path_stream = stream.sub(path);
    DecisionProblem current = problem;
    for (std::size_t j = 0; j < stages; ++j) {
      const auto [act, value] = best_act(current);
      const RefinementModel model =
          schedule[j].model.instantiate(value, act_probability(current, act));
      SplitSpec split;
      split.target = act;
      split.outcome = sample_outcome(model, path_stream.sub(j));
      split.label1 = "s" + std::to_string(j) + "b1";
      split.label2 = "s" + std::to_string(j) + "b2";
      current = refine_binary(current, split);
      values[j][path] = best_act(current).second;
    }
    return 0.0;
  });

  std::vector<RefinementGain> chain;
  chain.reserve(stages);
  double previous_mean = optimum_value(problem, GainCriterion::utility);
  for (std::size_t j = 0; j < stages; ++j) {
    const MeanStdError stats = mean_std_error(values[j]);
    RefinementGain g;
    g.v0 = previous_mean;
    g.v1_mean = stats.mean;
    g.std_error = stats.std_error;
    g.n = n_paths;
    chain.push_back(g);
    previous_mean = stats.mean;
  }
  return chain;
}

StoppingPlan optimal_stopping(const std::vector<double>& deltas, double cost) {
  require(!deltas.empty(), Errc::bad_argument, "need at least one marginal gain");
  require(cost > 0.0 && std::isfinite(cost), Errc::bad_argument, "cost must be positive");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] >= 0.0, Errc::not_vanishing_returns,
            "marginal gains must be nonnegative");
    if (i + 1 < deltas.size()) {
      require(deltas[i] > deltas[i + 1], Errc::not_vanishing_returns,
              "marginal gains must be strictly decreasing");
    }
  }

  StoppingPlan plan;
  plan.per_step.reserve(deltas.size());
  for (double d : deltas) plan.per_step.push_back({d, d - cost});

  if (cost > deltas[0]) {
    plan.net_gain = 0.0;
    return plan;  // never refine
  }
  std::size_t t_star = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] >= cost) t_star = i;
  }
  plan.t_star = t_star;
  double net = 0.0;
  for (std::size_t i = 0; i <= t_star; ++i) net += deltas[i] - cost;
  plan.net_gain = net;
  return plan;
}

}  // namespace refinery
