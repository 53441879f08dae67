// Experiment runner: one seeded, reproducible subcommand per result.
// Exit codes: 0 success, 2 validation error, 3 runtime error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "refinery/algebra.hpp"
#include "refinery/bargaining.hpp"
#include "refinery/games.hpp"
#include "refinery/io.hpp"
#include "refinery/multi_value.hpp"
#include "refinery/oracles.hpp"
#include "refinery/refinement.hpp"
#include "refinery/single_agent.hpp"

namespace {

using namespace refinery;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct VerifyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerifyUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::io_failure, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  require(static_cast<bool>(in), Errc::io_failure, "read from " + path + " failed");
  return buffer.str();
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double value = std::strtod(item.c_str(), &end);
    require(end && *end == '\0', Errc::bad_argument, "cannot parse number '" + item + "'");
    out.push_back(value);
  }
  require(!out.empty(), Errc::bad_argument, "empty number list");
  return out;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  fail(Errc::bad_argument, "unknown format '" + text + "'");
}

ValueFunction parse_value_function(const std::string& text) {
  if (text == "linear") return ValueFunction::linear();
  if (text == "sqrt") return ValueFunction::power(0.5);
  if (text.rfind("power:", 0) == 0) {
    return ValueFunction::power(std::strtod(text.c_str() + 6, nullptr));
  }
  fail(Errc::bad_argument, "unknown value function '" + text + "' (linear, sqrt, power:A)");
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  require(seed.has_value(), Errc::bad_argument, "--seed is required for stochastic runs");
  return *seed;
}

// ---------------------------------------------------------------------------
// refine-value

struct RefineValueArgs {
  std::string problem_path;
  std::string model_spec;  // file path or "builtin:NAME"
  std::optional<std::size_t> act;
  std::string criterion = "utility";
  std::size_t n = 100000;
  std::optional<std::uint64_t> seed;
  bool verify = false;
};

DecisionProblem load_problem_or_default(const std::string& path) {
  if (path.empty()) {
    return make_problem({"a", "b"}, {{0}, {1}}, {0.5, 0.5}, {0.0, -1.0});
  }
  return problem_from_json(read_file(path));
}

RefinementModel load_model(const std::string& spec, double u0, double p0) {
  require(!spec.empty(), Errc::bad_argument, "--model is required");
  if (spec.rfind("builtin:", 0) == 0) return builtin_model(spec.substr(8), u0, p0);
  return model_from_json(read_file(spec));
}

// Exact or quadrature oracle for the expected post-refinement optimum.
// Finite-support models enumerate the (q, delta, mass) product; continuous
// spreads with point q and point mass integrate by Simpson's rule.
double refine_value_oracle(const DecisionProblem& problem, std::size_t act,
                           const RefinementModel& model, GainCriterion criterion) {
  double untouched = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < problem.act_count(); ++i) {
    if (i == act) continue;
    const double u = act_desirability(problem, i);
    untouched = std::max(untouched,
                         criterion == GainCriterion::utility
                             ? u
                             : act_probability(problem, i) * u);
  }
  const double p0 = act_probability(problem, act);

  auto value_for = [&](double q, double delta, double s) {
    const double q_u = model.mode == ReflectionMode::per_sample ? q : model.q_dist.mean();
    const double u1 = model.u0 + (1.0 - q_u) * delta + model.u1_bias;
    const double u2 = model.u0 - q_u * delta;
    const double z = 1.0 - p0 + s;
    if (criterion == GainCriterion::utility) return std::max({untouched, u1, u2});
    return std::max({untouched / z, q * s * u1 / z, (1.0 - q) * s * u2 / z});
  };

  auto atoms_of = [](const DistSpec& d) {
    std::vector<std::pair<double, double>> atoms;
    if (d.kind == DistSpec::Kind::point) atoms = {{1.0, d.value}};
    else atoms = {{1.0 - d.p_hi, d.lo}, {d.p_hi, d.hi}};
    return atoms;
  };

  if (model.q_dist.finite_support() && model.spread_dist.finite_support() &&
      model.mass_dist.finite_support()) {
    double total = 0.0;
    for (const auto& [pq, q] : atoms_of(model.q_dist)) {
      for (const auto& [pd, delta] : atoms_of(model.spread_dist)) {
        for (const auto& [ps, s] : atoms_of(model.mass_dist)) {
          total += pq * pd * ps * value_for(q, delta, s);
        }
      }
    }
    return total;
  }

  if (model.q_dist.kind == DistSpec::Kind::point &&
      model.mass_dist.kind == DistSpec::Kind::point) {
    const double q = model.q_dist.value;
    const double s = model.mass_dist.value;
    const DistSpec& spread = model.spread_dist;
    double lo = spread.lo;
    double hi = spread.hi;
    std::function<double(double)> density;
    if (spread.kind == DistSpec::Kind::uniform) {
      density = [&](double) { return 1.0 / (hi - lo); };
    } else if (spread.kind == DistSpec::Kind::gaussian) {
      lo = std::max(spread.lo, spread.mean_param - 10.0 * spread.sd);
      hi = std::min(spread.hi, spread.mean_param + 10.0 * spread.sd);
      const double norm = 0.5 * (std::erf((hi - spread.mean_param) / (spread.sd * std::numbers::sqrt2)) -
                                 std::erf((lo - spread.mean_param) / (spread.sd * std::numbers::sqrt2)));
      density = [&, norm](double x) {
        const double zscore = (x - spread.mean_param) / spread.sd;
        return std::exp(-0.5 * zscore * zscore) /
               (spread.sd * std::sqrt(2.0 * std::numbers::pi) * norm);
      };
    } else {
      throw VerifyUnsupported("no oracle for this spread family");
    }
    const std::size_t intervals = 200000;  // even
    const double h = (hi - lo) / static_cast<double>(intervals);
    double total = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double x = lo + h * static_cast<double>(i);
      const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      total += weight * density(x) * value_for(q, x, s);
    }
    return total * h / 3.0;
  }

  throw VerifyUnsupported("verification needs finite support or point q and mass");
}

int run_refine_value(const RefineValueArgs& args, OutputFormat format,
                     const std::string& out_path) {
  const auto problem = load_problem_or_default(args.problem_path);
  const std::size_t act = args.act.value_or(best_act(problem).first);
  const auto model =
      load_model(args.model_spec, act_desirability(problem, act), act_probability(problem, act));
  const GainCriterion criterion = args.criterion == "utility"
                                      ? GainCriterion::utility
                                      : GainCriterion::probability_weighted;
  require(args.criterion == "utility" || args.criterion == "probability-weighted",
          Errc::bad_argument, "criterion must be utility or probability-weighted");
  const std::uint64_t seed = require_seed(args.seed);
  const auto gain =
      value_of_refinement(problem, act, model, args.n, RngStream(seed), criterion);

  if (args.verify) {
    const double exact = refine_value_oracle(problem, act, model, criterion);
    const double slack = 4.0 * gain.std_error + 1e-9;
    if (std::abs(gain.v1_mean - exact) > slack) {
      throw VerifyFailure("refine-value mean " + format_double(gain.v1_mean) +
                          " disagrees with oracle " + format_double(exact));
    }
  }

  Table table;
  table.header = {"seed", "n", "criterion", "v0", "v1_mean", "se", "gain"};
  table.add_row({seed, static_cast<std::uint64_t>(args.n), args.criterion, gain.v0,
                 gain.v1_mean, gain.std_error, gain.gain()});
  write_table_to(table, format, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// refine-chain

ModelTemplate template_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  ModelTemplate t;
  if (doc.contains("q")) t.q_dist = dist_from_json_text(doc.at("q").dump());
  if (doc.contains("spread")) t.spread_dist = dist_from_json_text(doc.at("spread").dump());
  if (doc.contains("mass")) t.mass_dist = dist_from_json_text(doc.at("mass").dump());
  const std::string mode = doc.value("mode", "per-sample");
  t.mode = mode == "expectation" ? ReflectionMode::expectation : ReflectionMode::per_sample;
  return t;
}

int run_refine_chain(const std::string& problem_path, const std::string& stages_path,
                     std::size_t n, std::optional<std::uint64_t> seed_opt, bool verify,
                     OutputFormat format, const std::string& out_path) {
  const auto problem = load_problem_or_default(problem_path);
  require(!stages_path.empty(), Errc::bad_argument, "--stages is required");
  std::vector<StageSpec> schedule;
  try {
    const auto doc = nlohmann::json::parse(read_file(stages_path));
    require(doc.is_array() && !doc.empty(), Errc::bad_argument,
            "--stages must be a JSON array of model templates");
    for (const auto& entry : doc) {
      StageSpec stage;
      stage.model = template_from_json(entry.dump());
      schedule.push_back(stage);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("stages document malformed: ") + e.what());
  }
  const std::uint64_t seed = require_seed(seed_opt);
  const auto chain = sequential_refinement(problem, schedule, n, RngStream(seed));

  if (verify) {
    // exhaustive path enumeration over finite-support stages
    for (const auto& stage : schedule) {
      if (!stage.model.q_dist.finite_support() || !stage.model.spread_dist.finite_support() ||
          (stage.model.mass_dist && !stage.model.mass_dist->finite_support())) {
        throw VerifyUnsupported("chain verification needs finite-support stages");
      }
    }
    std::vector<double> exact_means(schedule.size(), 0.0);
    struct Frame {
      DecisionProblem problem;
      double prob;
    };
    std::vector<Frame> frontier;
    frontier.push_back({problem, 1.0});
    for (std::size_t j = 0; j < schedule.size(); ++j) {
      std::vector<Frame> next;
      for (const Frame& frame : frontier) {
        const auto [act, value] = best_act(frame.problem);
        const auto model =
            schedule[j].model.instantiate(value, act_probability(frame.problem, act));
        auto atoms_of = [](const DistSpec& d) {
          std::vector<std::pair<double, double>> atoms;
          if (d.kind == DistSpec::Kind::point) atoms = {{1.0, d.value}};
          else atoms = {{1.0 - d.p_hi, d.lo}, {d.p_hi, d.hi}};
          return atoms;
        };
        for (const auto& [pq, q] : atoms_of(model.q_dist)) {
          for (const auto& [pd, delta] : atoms_of(model.spread_dist)) {
            for (const auto& [ps, s] : atoms_of(model.mass_dist)) {
              const double weight = frame.prob * pq * pd * ps;
              if (weight == 0.0) continue;
              SplitSpec split;
              split.target = act;
              split.outcome.u1 = model.u0 + (1.0 - q) * delta;
              split.outcome.u2 = model.u0 - q * delta;
              split.outcome.p1 = q * s;
              split.outcome.p2 = (1.0 - q) * s;
              next.push_back({refine_binary(frame.problem, split), weight});
            }
          }
        }
      }
      frontier = std::move(next);
      for (const Frame& frame : frontier) {
        exact_means[j] += frame.prob * best_act(frame.problem).second;
      }
    }
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const double slack = 4.0 * chain[j].std_error + 1e-9;
      if (std::abs(chain[j].v1_mean - exact_means[j]) > slack) {
        throw VerifyFailure("stage " + std::to_string(j) + " mean " +
                            format_double(chain[j].v1_mean) + " disagrees with oracle " +
                            format_double(exact_means[j]));
      }
    }
  }

  Table table;
  table.header = {"stage", "seed", "n", "v0", "v1_mean", "se"};
  for (std::size_t j = 0; j < chain.size(); ++j) {
    table.add_row({static_cast<std::uint64_t>(j), seed, static_cast<std::uint64_t>(n),
                   chain[j].v0, chain[j].v1_mean, chain[j].std_error});
  }
  write_table_to(table, format, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stopping

int run_stopping(const std::string& deltas_text, double cost, bool per_step, bool verify,
                 OutputFormat format, const std::string& out_path) {
  const auto deltas = parse_double_list(deltas_text);
  const auto plan = optimal_stopping(deltas, cost);

  if (verify) {
    double best = 0.0;
    double running = 0.0;
    for (double d : deltas) {
      running += d - cost;
      best = std::max(best, running);
    }
    if (plan.net_gain != best) {
      throw VerifyFailure("stopping net gain " + format_double(plan.net_gain) +
                          " disagrees with brute force " + format_double(best));
    }
  }

  Table table;
  if (per_step) {
    table.header = {"step", "delta", "net", "included"};
    for (std::size_t i = 0; i < plan.per_step.size(); ++i) {
      const bool included = plan.t_star.has_value() && i <= *plan.t_star;
      table.add_row({static_cast<std::uint64_t>(i), plan.per_step[i].delta,
                     plan.per_step[i].net, std::string(included ? "yes" : "no")});
    }
  } else {
    table.header = {"t_star", "net_gain"};
    table.add_row({plan.never() ? std::string("never") : std::to_string(*plan.t_star),
                   plan.net_gain});
  }
  write_table_to(table, format, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dilemma

int run_dilemma(const std::string& profile_path, std::size_t act_a, std::size_t act_not_a,
                const std::string& joint_path, std::size_t n,
                std::optional<std::uint64_t> seed_opt, const std::string& method,
                bool verify, OutputFormat format, const std::string& out_path) {
  require(!profile_path.empty(), Errc::bad_argument, "--profile is required");
  require(!joint_path.empty(), Errc::bad_argument, "--joint is required");
  const auto profile = profile_from_json(read_file(profile_path));
  const auto joint = joint_from_json(read_file(joint_path));

  std::vector<double> rivals(profile.dims());
  for (std::size_t d = 0; d < profile.dims(); ++d) {
    rivals[d] = profile.act_value(d, act_not_a);
  }
  auto exact_probability = [&]() {
    if (joint.coupling != JointCoupling::explicit_joint) {
      throw VerifyUnsupported("exact dilemma evaluation needs an explicit joint");
    }
    require(detect_dilemma(profile, act_a, act_not_a), Errc::not_a_dilemma,
            "acts do not form a dilemma");
    double total = 0.0;
    for (const auto& [p, values] : joint.outcomes) {
      JointOutcome outcome;
      outcome.q = joint.q_dist.mean();
      outcome.branch_values = values;
      if (classify_joint_outcome(outcome, rivals) != DominanceEvent::none) total += p;
    }
    return total;
  };

  double prob = 0.0;
  double se = 0.0;
  std::uint64_t seed = 0;
  if (method == "exhaustive") {
    prob = exact_probability();
    seed = seed_opt.value_or(0);
  } else if (method == "monte-carlo") {
    seed = require_seed(seed_opt);
    const auto est = resolution_probability(profile, act_a, act_not_a, joint, n, RngStream(seed));
    prob = est.prob;
    se = est.std_error;
    if (verify) {
      const double exact = exact_probability();
      if (std::abs(prob - exact) > 4.0 * se + 1e-9) {
        throw VerifyFailure("dilemma probability " + format_double(prob) +
                            " disagrees with enumeration " + format_double(exact));
      }
    }
  } else {
    fail(Errc::bad_argument, "method must be monte-carlo or exhaustive");
  }

  Table table;
  table.header = {"seed", "n", "method", "prob", "se"};
  table.add_row({seed, static_cast<std::uint64_t>(n), method, prob, se});
  write_table_to(table, format, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// zerosum

int run_zerosum(const std::string& base, double v, double alpha, double beta, double gamma,
                double rho, const std::string& family, double magnitude,
                const std::string& method, std::size_t n,
                std::optional<std::uint64_t> seed_opt, bool verify, OutputFormat format,
                const std::string& out_path) {
  ZeroSumSpec spec;
  if (base == "matching-pennies") {
    spec = matching_pennies();
  } else if (base == "custom") {
    spec = {v, alpha, beta, gamma};
  } else {
    fail(Errc::bad_argument, "base must be matching-pennies or custom");
  }
  spec.validate();
  PerturbationModel model;
  model.rho = rho;
  model.magnitude = magnitude;
  if (family == "two-point") model.family = PerturbationFamily::two_point;
  else if (family == "gaussian") model.family = PerturbationFamily::gaussian;
  else fail(Errc::bad_argument, "family must be two-point or gaussian");

  WelfareEstimate estimate;
  std::uint64_t seed = 0;
  if (method == "exhaustive") {
    seed = seed_opt.value_or(0);
    estimate = expected_refined_welfare(spec, model, 0, RngStream(seed),
                                        WelfareMethod::exhaustive);
  } else if (method == "monte-carlo") {
    seed = require_seed(seed_opt);
    estimate = expected_refined_welfare(spec, model, n, RngStream(seed),
                                        WelfareMethod::monte_carlo);
  } else {
    fail(Errc::bad_argument, "method must be monte-carlo or exhaustive");
  }

  if (verify) {
    if (model.family != PerturbationFamily::two_point) {
      throw VerifyUnsupported("zerosum verification needs the two-point family");
    }
    const auto exact = expected_refined_welfare(spec, model, 0, RngStream(seed),
                                                WelfareMethod::exhaustive);
    if (method == "exhaustive") {
      const auto mc = expected_refined_welfare(spec, model, std::max<std::size_t>(n, 10000),
                                               RngStream(seed_opt.value_or(7)),
                                               WelfareMethod::monte_carlo);
      if (std::abs(mc.mean - exact.mean) > 4.0 * mc.std_error + 1e-9) {
        throw VerifyFailure("exhaustive mean " + format_double(exact.mean) +
                            " disagrees with Monte Carlo " + format_double(mc.mean));
      }
    } else if (std::abs(estimate.mean - exact.mean) > 4.0 * estimate.std_error + 1e-9) {
      throw VerifyFailure("Monte Carlo mean " + format_double(estimate.mean) +
                          " disagrees with enumeration " + format_double(exact.mean));
    }
  }

  Table table;
  table.header = {"seed", "rho", "magnitude", "method", "mean_w", "se",
                  "p_full_agreement", "p_E1"};
  table.add_row({seed, rho, magnitude, method, estimate.mean, estimate.std_error,
                 estimate.p_full_agreement, estimate.p_e1});
  write_table_to(table, format, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bargain / sweep-correlation

BargainingSpec build_bargaining_spec(const std::string& value_fn, double sigma, double rho,
                                     const std::string& weight_model, double d) {
  BargainingSpec spec;
  spec.v1 = parse_value_function(value_fn);
  spec.v2 = parse_value_function(value_fn);
  spec.d = {d, d};
  spec.weights.sigma = sigma;
  spec.weights.rho = rho;
  if (weight_model == "two-point") spec.weights.kind = WeightModel::Kind::two_point;
  else if (weight_model == "independent-uniform") {
    spec.weights.kind = WeightModel::Kind::independent_uniform;
  } else {
    fail(Errc::bad_argument, "weight model must be two-point or independent-uniform");
  }
  spec.validate();
  return spec;
}

void grid_check_realizations(const BargainingSpec& spec, const PayoffEstimate& est) {
  for (const auto& r : est.realizations) {
    auto u1 = [&](double x1, double x2) {
      return r.w1 * spec.v1(x1) + (1.0 - r.w1) * spec.v2(x2);
    };
    auto u2 = [&](double x1, double x2) {
      return r.w2 * spec.v1(1.0 - x1) + (1.0 - r.w2) * spec.v2(1.0 - x2);
    };
    const auto grid = grid_maximize_2d(
        [&](double x1, double x2) {
          const double g1 = u1(x1, x2) - spec.d.first;
          const double g2 = u2(x1, x2) - spec.d.second;
          return g1 > 0.0 && g2 > 0.0 ? g1 * g2 : std::min(g1, g2);
        },
        0.0, 1.0, 0.0, 1.0, 2001);
    const double grid_p1 = u1(grid.x, grid.y);
    const double grid_p2 = u2(grid.x, grid.y);
    if (std::abs(r.payoff1 - grid_p1) > 1e-4 || std::abs(r.payoff2 - grid_p2) > 1e-4) {
      throw VerifyFailure("bargain solution at weights (" + format_double(r.w1) + "," +
                          format_double(r.w2) + ") drifts from the grid oracle");
    }
  }
}

int run_bargain(const std::string& value_fn, double sigma, double rho,
                const std::string& weight_model, double d, const std::string& method,
                std::size_t n, std::optional<std::uint64_t> seed_opt, bool verify,
                OutputFormat format, const std::string& out_path) {
  const auto spec = build_bargaining_spec(value_fn, sigma, rho, weight_model, d);
  PayoffEstimate estimate;
  std::uint64_t seed = 0;
  if (method == "exhaustive") {
    seed = seed_opt.value_or(0);
    estimate = expected_refined_payoffs(spec, 0, RngStream(seed), BargainMethod::exhaustive);
  } else if (method == "monte-carlo") {
    seed = require_seed(seed_opt);
    estimate = expected_refined_payoffs(spec, n, RngStream(seed), BargainMethod::monte_carlo);
  } else {
    fail(Errc::bad_argument, "method must be monte-carlo or exhaustive");
  }

  if (verify) {
    if (spec.weights.kind != WeightModel::Kind::two_point) {
      throw VerifyUnsupported("bargain verification needs the two-point weight model");
    }
    const auto exact =
        expected_refined_payoffs(spec, 0, RngStream(seed), BargainMethod::exhaustive);
    grid_check_realizations(spec, exact);
    if (method == "monte-carlo") {
      if (std::abs(estimate.mean1 - exact.mean1) > 4.0 * estimate.se1 + 1e-9 ||
          std::abs(estimate.mean2 - exact.mean2) > 4.0 * estimate.se2 + 1e-9) {
        throw VerifyFailure("Monte Carlo payoffs disagree with the exhaustive joint");
      }
    }
  }

  Table table;
  table.header = {"rho", "sigma", "family", "gain1_mean", "gain1_se", "gain2_mean",
                  "gain2_se", "baseline1", "baseline2"};
  table.add_row({rho, sigma, spec.v1.name(), estimate.mean1 - estimate.baseline1,
                 estimate.se1, estimate.mean2 - estimate.baseline2, estimate.se2,
                 estimate.baseline1, estimate.baseline2});
  write_table_to(table, format, out_path);
  return kExitOk;
}

int run_sweep(const std::string& value_fn, double sigma, const std::string& rhos_text,
              double d, bool verify, OutputFormat format, const std::string& out_path) {
  const auto spec = build_bargaining_spec(value_fn, sigma, 0.0, "two-point", d);
  const auto rhos = parse_double_list(rhos_text);
  const auto rows = correlation_sweep(spec, sigma, rhos);

  if (verify) {
    for (double rho : rhos) {
      BargainingSpec variant = spec;
      variant.weights.rho = rho;
      const auto est =
          expected_refined_payoffs(variant, 0, RngStream(0), BargainMethod::exhaustive);
      grid_check_realizations(variant, est);
    }
  }

  Table table;
  table.header = {"rho", "sigma", "family", "gain1_mean", "gain1_se", "gain2_mean",
                  "gain2_se", "baseline1", "baseline2"};
  for (const auto& row : rows) {
    table.add_row({row.rho, sigma, spec.v1.name(), row.gain1, 0.0, row.gain2, 0.0,
                   row.baseline1, row.baseline2});
  }
  write_table_to(table, format, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refinery: seeded experiments for act-refinement decision problems"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::size_t n = 100000;
  std::string out_path;
  std::string format_text = "csv";
  bool verify = false;
  auto add_common = [&](CLI::App* cmd, bool stochastic) {
    cmd->add_option("--seed", seed, "random seed (64-bit)");
    if (stochastic) cmd->add_option("--n", n, "sample count");
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--format", format_text, "csv or json")->default_str("csv");
    cmd->add_flag("--verify", verify, "re-run the oracle comparison; exit 3 on drift");
  };

  // refine-value
  RefineValueArgs rv;
  auto* cmd_rv = app.add_subcommand("refine-value", "expected value of one refinement");
  cmd_rv->add_option("--problem", rv.problem_path, "problem JSON (default: two-act coin)");
  cmd_rv->add_option("--model", rv.model_spec, "model JSON path or builtin:NAME")->required();
  std::size_t rv_act = 0;
  auto* rv_act_opt = cmd_rv->add_option("--act", rv_act, "act to refine (default: best act)");
  cmd_rv->add_option("--criterion", rv.criterion, "utility or probability-weighted");
  add_common(cmd_rv, true);

  // refine-chain
  std::string chain_problem, chain_stages;
  auto* cmd_chain = app.add_subcommand("refine-chain", "sequential refinement chain");
  cmd_chain->add_option("--problem", chain_problem, "problem JSON (default: two-act coin)");
  cmd_chain->add_option("--stages", chain_stages, "JSON array of stage model templates")
      ->required();
  add_common(cmd_chain, true);

  // stopping
  std::string deltas_text;
  double cost = 0.0;
  bool per_step = false;
  auto* cmd_stop = app.add_subcommand("stopping", "fixed-cost optimal stopping plan");
  cmd_stop->add_option("--deltas", deltas_text, "comma-separated marginal gains")->required();
  cmd_stop->add_option("--cost", cost, "per-refinement cost")->required();
  cmd_stop->add_flag("--per-step", per_step, "emit one row per step");
  add_common(cmd_stop, false);

  // dilemma
  std::string profile_path, joint_path;
  std::size_t act_a = 0, act_not_a = 1;
  std::string dilemma_method = "monte-carlo";
  auto* cmd_dilemma = app.add_subcommand("dilemma", "dilemma resolution probability");
  cmd_dilemma->add_option("--profile", profile_path, "value profile JSON")->required();
  cmd_dilemma->add_option("--joint", joint_path, "joint refinement model JSON")->required();
  cmd_dilemma->add_option("--act-a", act_a, "dilemma act favored by dimension 1");
  cmd_dilemma->add_option("--act-not-a", act_not_a, "the rival act");
  cmd_dilemma->add_option("--method", dilemma_method, "monte-carlo or exhaustive");
  add_common(cmd_dilemma, true);

  // zerosum
  std::string base = "matching-pennies";
  double zs_v = 1.0, zs_alpha = -1.0, zs_beta = -1.0, zs_gamma = 1.0;
  double rho = 0.0, magnitude = 0.5;
  std::string family = "two-point";
  std::string zs_method = "exhaustive";
  auto* cmd_zs = app.add_subcommand("zerosum", "expected refined welfare of a zero-sum game");
  cmd_zs->add_option("--base", base, "matching-pennies or custom");
  cmd_zs->add_option("--v", zs_v, "payoff v (custom base)");
  cmd_zs->add_option("--alpha", zs_alpha, "payoff alpha (custom base)");
  cmd_zs->add_option("--beta", zs_beta, "payoff beta (custom base)");
  cmd_zs->add_option("--gamma", zs_gamma, "payoff gamma (custom base)");
  cmd_zs->add_option("--rho", rho, "perturbation correlation in [-1,1]");
  cmd_zs->add_option("--family", family, "two-point or gaussian");
  cmd_zs->add_option("--mag", magnitude, "perturbation magnitude");
  cmd_zs->add_option("--method", zs_method, "monte-carlo or exhaustive");
  add_common(cmd_zs, true);

  // bargain
  std::string bargain_v = "linear";
  double sigma = 0.5;
  double bargain_rho = 0.0;
  std::string weight_model = "two-point";
  double disagreement = 0.0;
  std::string bargain_method = "exhaustive";
  auto* cmd_bargain = app.add_subcommand("bargain", "refined Nash bargaining payoffs");
  cmd_bargain->add_option("--v", bargain_v, "value function: linear, sqrt, power:A");
  cmd_bargain->add_option("--sigma", sigma, "weight sd in (0, 1/2]");
  cmd_bargain->add_option("--rho", bargain_rho, "weight correlation in [-1,1]");
  cmd_bargain->add_option("--weight-model", weight_model, "two-point or independent-uniform");
  cmd_bargain->add_option("--d", disagreement, "symmetric disagreement payoff");
  cmd_bargain->add_option("--method", bargain_method, "monte-carlo or exhaustive");
  add_common(cmd_bargain, true);

  // sweep-correlation
  std::string sweep_v = "linear";
  double sweep_sigma = 0.5;
  std::string rhos_text = "-1,-0.5,0,0.5,1";
  double sweep_d = 0.0;
  auto* cmd_sweep = app.add_subcommand("sweep-correlation", "gain vs weight correlation");
  cmd_sweep->add_option("--v", sweep_v, "value function: linear, sqrt, power:A");
  cmd_sweep->add_option("--sigma", sweep_sigma, "weight sd in (0, 1/2]");
  cmd_sweep->add_option("--rhos", rhos_text, "ascending comma-separated correlations");
  cmd_sweep->add_option("--d", sweep_d, "symmetric disagreement payoff");
  add_common(cmd_sweep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    const OutputFormat format = parse_format(format_text);
    if (cmd_rv->parsed()) {
      if (rv_act_opt->count() > 0) rv.act = rv_act;
      rv.n = n;
      rv.seed = seed;
      rv.verify = verify;
      return run_refine_value(rv, format, out_path);
    }
    if (cmd_chain->parsed()) {
      return run_refine_chain(chain_problem, chain_stages, n, seed, verify, format, out_path);
    }
    if (cmd_stop->parsed()) {
      return run_stopping(deltas_text, cost, per_step, verify, format, out_path);
    }
    if (cmd_dilemma->parsed()) {
      return run_dilemma(profile_path, act_a, act_not_a, joint_path, n, seed, dilemma_method,
                         verify, format, out_path);
    }
    if (cmd_zs->parsed()) {
      return run_zerosum(base, zs_v, zs_alpha, zs_beta, zs_gamma, rho, family, magnitude,
                         zs_method, n, seed, verify, format, out_path);
    }
    if (cmd_bargain->parsed()) {
      return run_bargain(bargain_v, sigma, bargain_rho, weight_model, disagreement,
                         bargain_method, n, seed, verify, format, out_path);
    }
    if (cmd_sweep->parsed()) {
      return run_sweep(sweep_v, sweep_sigma, rhos_text, sweep_d, verify, format, out_path);
    }
    std::cerr << "no subcommand selected\n";
    return kExitValidation;
  } catch (const VerifyFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const VerifyUnsupported& e) {
    std::cerr << "verification unavailable: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.is_validation() ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
