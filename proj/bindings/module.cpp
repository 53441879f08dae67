#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "refinery/algebra.hpp"
#include "refinery/bargaining.hpp"
#include "refinery/games.hpp"
#include "refinery/multi_value.hpp"
#include "refinery/oracles.hpp"
#include "refinery/refinement.hpp"
#include "refinery/single_agent.hpp"

namespace py = pybind11;
using namespace refinery;

namespace {

GainCriterion parse_criterion(const std::string& text) {
  if (text == "utility") return GainCriterion::utility;
  if (text == "probability-weighted") return GainCriterion::probability_weighted;
  fail(Errc::bad_argument, "criterion must be utility or probability-weighted");
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows, std::vector<double>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) rows[r][c] = m.at(r, c);
  }
  return rows;
}

BimatrixGame game_from_rows(const std::vector<std::vector<double>>& payoff1,
                            const std::vector<std::vector<double>>& payoff2) {
  require(!payoff1.empty() && payoff1.size() == payoff2.size(), Errc::length_mismatch,
          "payoff matrices must agree in shape");
  BimatrixGame g;
  g.payoff1 = Matrix(payoff1.size(), payoff1[0].size());
  g.payoff2 = Matrix(payoff2.size(), payoff2[0].size());
  for (std::size_t r = 0; r < payoff1.size(); ++r) {
    require(payoff1[r].size() == g.payoff1.cols && payoff2[r].size() == g.payoff2.cols,
            Errc::length_mismatch, "ragged payoff matrix");
    for (std::size_t c = 0; c < payoff1[r].size(); ++c) {
      g.payoff1.at(r, c) = payoff1[r][c];
      g.payoff2.at(r, c) = payoff2[r][c];
    }
  }
  g.validate();
  return g;
}

py::dict equilibrium_dict(const Equilibrium& eq) {
  py::dict out;
  out["row_mix"] = eq.profile.row_mix;
  out["col_mix"] = eq.profile.col_mix;
  out["payoff1"] = eq.payoff1;
  out["payoff2"] = eq.payoff2;
  out["welfare"] = eq.welfare;
  return out;
}

py::dict gain_dict(const RefinementGain& g) {
  py::dict out;
  out["v0"] = g.v0;
  out["v1_mean"] = g.v1_mean;
  out["std_error"] = g.std_error;
  out["gain"] = g.gain();
  out["n"] = g.n;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Act-refinement decision problems: refinement operators, refinement-"
            "outcome models, stopping rules, dilemma resolution, zero-sum escape, "
            "and Nash bargaining.";

  py::register_exception<Error>(m, "RefineryError");

  py::class_<DistSpec>(m, "DistSpec")
      .def_static("point", &DistSpec::point, py::arg("value"))
      .def_static("two_point", &DistSpec::two_point, py::arg("lo"), py::arg("hi"),
                  py::arg("p_hi") = 0.5)
      .def_static("two_point_sym", &DistSpec::two_point_sym, py::arg("a"),
                  py::arg("p_plus") = 0.5)
      .def_static("uniform", &DistSpec::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("gaussian", &DistSpec::gaussian, py::arg("mean"), py::arg("sd"),
                  py::arg("lo") = -std::numeric_limits<double>::infinity(),
                  py::arg("hi") = std::numeric_limits<double>::infinity())
      .def("mean", &DistSpec::mean)
      .def("__repr__", [](const DistSpec& d) { return "DistSpec(" + d.describe() + ")"; });

  py::class_<DecisionProblem>(m, "DecisionProblem")
      .def_property_readonly("atom_count", &DecisionProblem::atom_count)
      .def_property_readonly("act_count", &DecisionProblem::act_count)
      .def("to_json", &problem_to_json)
      .def("__repr__", [](const DecisionProblem& p) {
        return "DecisionProblem(atoms=" + std::to_string(p.atom_count()) +
               ", acts=" + std::to_string(p.act_count()) + ")";
      });

  m.def("make_problem", &make_problem, py::arg("labels"), py::arg("acts"),
        py::arg("credence"), py::arg("desirability"));
  m.def("problem_from_json", &problem_from_json, py::arg("text"));
  m.def("act_probability", &act_probability, py::arg("problem"), py::arg("act"));
  m.def("act_desirability", &act_desirability, py::arg("problem"), py::arg("act"));
  m.def(
      "proposition_probability",
      [](const DecisionProblem& p, const std::vector<AtomId>& ids) {
        return probability(p, Proposition(ids));
      },
      py::arg("problem"), py::arg("atom_ids"));
  m.def(
      "proposition_desirability",
      [](const DecisionProblem& p, const std::vector<AtomId>& ids) {
        return desirability(p, Proposition(ids));
      },
      py::arg("problem"), py::arg("atom_ids"));
  m.def(
      "refine_binary",
      [](const DecisionProblem& p, std::size_t target, double u1, double u2, double p1,
         double p2, const std::string& label1, const std::string& label2) {
        SplitSpec split;
        split.target = target;
        split.outcome = {u1, u2, p1, p2};
        split.label1 = label1;
        split.label2 = label2;
        return refine_binary(p, split);
      },
      py::arg("problem"), py::arg("target"), py::arg("u1"), py::arg("u2"), py::arg("p1"),
      py::arg("p2"), py::arg("label1") = "b1", py::arg("label2") = "b2");
  m.def(
      "refine_kary",
      [](const DecisionProblem& p, std::size_t target,
         const std::vector<std::pair<double, double>>& branches,
         const std::vector<std::string>& labels) {
        std::vector<KaryBranch> parsed;
        parsed.reserve(branches.size());
        for (const auto& [u, mass] : branches) parsed.push_back({u, mass});
        return refine_kary(p, target, parsed, labels);
      },
      py::arg("problem"), py::arg("target"), py::arg("branches"), py::arg("labels"));
  m.def("add_catch_all", &add_catch_all, py::arg("problem"), py::arg("credence"),
        py::arg("desirability"));

  py::class_<RefinementModel>(m, "RefinementModel")
      .def_readonly("u0", &RefinementModel::u0)
      .def_readonly("p0", &RefinementModel::p0)
      .def_readwrite("u1_bias", &RefinementModel::u1_bias)
      .def("to_json", &model_to_json);

  m.def(
      "make_model",
      [](double u0, double p0, const DistSpec& q, const DistSpec& spread,
         std::optional<DistSpec> mass, const std::string& mode) {
        const ReflectionMode parsed =
            mode == "expectation" ? ReflectionMode::expectation : ReflectionMode::per_sample;
        return mass ? make_model(u0, p0, q, spread, *mass, parsed)
                    : make_model(u0, p0, q, spread, parsed);
      },
      py::arg("u0"), py::arg("p0"), py::arg("q"), py::arg("spread"),
      py::arg("mass") = std::nullopt, py::arg("mode") = "per-sample");
  m.def("model_from_json", &model_from_json, py::arg("text"));
  m.def(
      "builtin_models",
      [](double u0, double p0) {
        py::dict out;
        for (const auto& [name, model] : builtin_model_battery(u0, p0)) {
          out[py::str(name)] = model;
        }
        return out;
      },
      py::arg("u0"), py::arg("p0"));
  m.def(
      "sample_outcome",
      [](const RefinementModel& model, std::uint64_t seed, std::uint64_t index) {
        const auto o = sample_outcome(model, RngStream(seed).sub(index));
        return py::make_tuple(o.u1, o.u2, o.p1, o.p2);
      },
      py::arg("model"), py::arg("seed"), py::arg("index") = 0);
  m.def(
      "check_rrp",
      [](const RefinementModel& model, std::size_t n, std::uint64_t seed) {
        const auto report = check_rrp(model, n, RngStream(seed));
        py::dict out;
        out["value_mean"] = report.value_mean;
        out["value_std_error"] = report.value_std_error;
        out["mass_mean"] = report.mass_mean;
        out["mass_std_error"] = report.mass_std_error;
        out["pass"] = report.pass;
        return out;
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def(
      "check_uncertainty",
      [](const RefinementModel& model, std::size_t n, std::uint64_t seed) {
        return check_uncertainty(model, n, RngStream(seed));
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));

  m.def("best_act", [](const DecisionProblem& p) { return best_act(p); }, py::arg("problem"));
  m.def(
      "value_of_refinement",
      [](const DecisionProblem& p, std::size_t act, const RefinementModel& model,
         std::size_t n, std::uint64_t seed, const std::string& criterion) {
        return gain_dict(
            value_of_refinement(p, act, model, n, RngStream(seed), parse_criterion(criterion)));
      },
      py::arg("problem"), py::arg("act"), py::arg("model"), py::arg("n"), py::arg("seed"),
      py::arg("criterion") = "utility");
  m.def(
      "refine_chain",
      [](const DecisionProblem& p,
         const std::vector<std::pair<DistSpec, DistSpec>>& stages, std::size_t n,
         std::uint64_t seed) {
        std::vector<StageSpec> schedule;
        for (const auto& [q, spread] : stages) {
          StageSpec stage;
          stage.model.q_dist = q;
          stage.model.spread_dist = spread;
          schedule.push_back(stage);
        }
        py::list out;
        for (const auto& g : sequential_refinement(p, schedule, n, RngStream(seed))) {
          out.append(gain_dict(g));
        }
        return out;
      },
      py::arg("problem"), py::arg("stages"), py::arg("n"), py::arg("seed"));
  m.def(
      "optimal_stopping",
      [](const std::vector<double>& deltas, double cost) {
        const auto plan = optimal_stopping(deltas, cost);
        py::dict out;
        out["t_star"] = plan.never() ? py::object(py::none())
                                     : py::object(py::int_(*plan.t_star));
        out["net_gain"] = plan.net_gain;
        py::list steps;
        for (const auto& s : plan.per_step) steps.append(py::make_tuple(s.delta, s.net));
        out["per_step"] = steps;
        return out;
      },
      py::arg("deltas"), py::arg("cost"));

  py::class_<ValueProfile>(m, "ValueProfile")
      .def_property_readonly("dims", &ValueProfile::dims)
      .def("act_value", &ValueProfile::act_value, py::arg("dim"), py::arg("act"))
      .def("to_json", &profile_to_json);
  m.def("make_profile", &make_profile, py::arg("problem"), py::arg("values"));
  m.def("profile_from_json", &profile_from_json, py::arg("text"));
  m.def("detect_dilemma", &detect_dilemma, py::arg("profile"), py::arg("act_a"),
        py::arg("act_not_a"));
  m.def(
      "multi_value_dominates",
      [](std::size_t candidate, const std::vector<std::size_t>& others,
         const ValueProfile& profile) {
        return multi_value_dominates(candidate, others, profile);
      },
      py::arg("candidate"), py::arg("others"), py::arg("profile"));
  m.def("joint_from_json", &joint_from_json, py::arg("text"));
  py::class_<JointRefinementModel>(m, "JointRefinementModel").def("to_json", &joint_to_json);
  m.def(
      "resolution_probability",
      [](const ValueProfile& profile, std::size_t act_a, std::size_t act_not_a,
         const JointRefinementModel& joint, std::size_t n, std::uint64_t seed) {
        const auto est =
            resolution_probability(profile, act_a, act_not_a, joint, n, RngStream(seed));
        return py::make_tuple(est.prob, est.std_error);
      },
      py::arg("profile"), py::arg("act_a"), py::arg("act_not_a"), py::arg("joint"),
      py::arg("n"), py::arg("seed"));
  m.def(
      "aggregate_utility",
      [](const std::vector<double>& values, const std::vector<double>& weights) {
        return aggregate_utility(values, weights);
      },
      py::arg("values"), py::arg("weights"));

  m.def(
      "solve_zero_sum_2x2",
      [](double v, double alpha, double beta, double gamma) {
        const auto sol = solve_zero_sum_2x2({v, alpha, beta, gamma});
        py::dict out;
        out["value"] = sol.value;
        out["row_mix"] = sol.profile.row_mix;
        out["col_mix"] = sol.profile.col_mix;
        return out;
      },
      py::arg("v"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"));
  m.def(
      "enumerate_equilibria",
      [](const std::vector<std::vector<double>>& payoff1,
         const std::vector<std::vector<double>>& payoff2) {
        const auto set = enumerate_equilibria(game_from_rows(payoff1, payoff2));
        py::list out;
        for (const auto& eq : set.equilibria) out.append(equilibrium_dict(eq));
        return py::make_tuple(out, set.degenerate);
      },
      py::arg("payoff1"), py::arg("payoff2"));
  m.def(
      "welfare_optimal_equilibrium",
      [](const std::vector<std::vector<double>>& payoff1,
         const std::vector<std::vector<double>>& payoff2) {
        const auto best = welfare_optimal_equilibrium(game_from_rows(payoff1, payoff2));
        return equilibrium_dict(best.equilibrium);
      },
      py::arg("payoff1"), py::arg("payoff2"));
  m.def(
      "refine_game",
      [](double v, double alpha, double beta, double gamma,
         const std::vector<std::vector<std::vector<double>>>& eps) {
        PerturbationSample sample;
        require(eps.size() == 2, Errc::length_mismatch, "eps must be [player][col][branch]");
        for (std::size_t i = 0; i < 2; ++i) {
          require(eps[i].size() == 2, Errc::length_mismatch, "eps must be 2x2x2");
          for (std::size_t j = 0; j < 2; ++j) {
            require(eps[i][j].size() == 2, Errc::length_mismatch, "eps must be 2x2x2");
            for (std::size_t k = 0; k < 2; ++k) sample.eps[i][j][k] = eps[i][j][k];
          }
        }
        const auto g = refine_game({v, alpha, beta, gamma}, sample);
        return py::make_tuple(matrix_rows(g.payoff1), matrix_rows(g.payoff2));
      },
      py::arg("v"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("eps"));
  m.def(
      "expected_refined_welfare",
      [](double v, double alpha, double beta, double gamma, const std::string& family,
         double magnitude, double rho, std::size_t n, std::uint64_t seed,
         const std::string& method) {
        PerturbationModel model;
        model.family = family == "gaussian" ? PerturbationFamily::gaussian
                                            : PerturbationFamily::two_point;
        model.magnitude = magnitude;
        model.rho = rho;
        const auto est = expected_refined_welfare(
            {v, alpha, beta, gamma}, model, n, RngStream(seed),
            method == "exhaustive" ? WelfareMethod::exhaustive : WelfareMethod::monte_carlo);
        py::dict out;
        out["mean"] = est.mean;
        out["std_error"] = est.std_error;
        out["p_full_agreement"] = est.p_full_agreement;
        out["p_E1"] = est.p_e1;
        return out;
      },
      py::arg("v") = 1.0, py::arg("alpha") = -1.0, py::arg("beta") = -1.0,
      py::arg("gamma") = 1.0, py::arg("family") = "two-point", py::arg("magnitude") = 0.5,
      py::arg("rho") = 0.0, py::arg("n") = 0, py::arg("seed") = 0,
      py::arg("method") = "exhaustive");

  py::class_<ValueFunction>(m, "ValueFunction")
      .def_static("linear", &ValueFunction::linear)
      .def_static("power", &ValueFunction::power, py::arg("exponent"))
      .def_static("custom_grid", &ValueFunction::custom_grid, py::arg("values"))
      .def("__call__", &ValueFunction::operator(), py::arg("x"))
      .def("name", &ValueFunction::name);

  auto build_spec = [](const ValueFunction& v1, const ValueFunction& v2, double sigma,
                       double rho, const std::string& weight_model, double d) {
    BargainingSpec spec;
    spec.v1 = v1;
    spec.v2 = v2;
    spec.d = {d, d};
    spec.weights.sigma = sigma;
    spec.weights.rho = rho;
    spec.weights.kind = weight_model == "independent-uniform"
                            ? WeightModel::Kind::independent_uniform
                            : WeightModel::Kind::two_point;
    spec.validate();
    return spec;
  };

  m.def(
      "nash_solution_1d",
      [](const ValueFunction& u, double d1, double d2) {
        const auto sol = nash_solution_1d(u, {d1, d2});
        py::dict out;
        out["allocation"] = sol.allocation;
        out["payoffs"] = py::make_tuple(sol.payoff1, sol.payoff2);
        out["nash_product"] = sol.nash_product;
        return out;
      },
      py::arg("u"), py::arg("d1") = 0.0, py::arg("d2") = 0.0);
  m.def(
      "nash_solution_2d",
      [&, build_spec](const ValueFunction& v1, const ValueFunction& v2, double w1, double w2,
                      double d) {
        BargainingSpec spec = build_spec(v1, v2, 0.25, 0.0, "two-point", d);
        const auto sol = nash_solution_2d(spec, {w1, w2});
        py::dict out;
        out["allocation"] = sol.allocation;
        out["payoffs"] = py::make_tuple(sol.payoff1, sol.payoff2);
        out["nash_product"] = sol.nash_product;
        return out;
      },
      py::arg("v1"), py::arg("v2"), py::arg("w1"), py::arg("w2"), py::arg("d") = 0.0);
  m.def(
      "expected_refined_payoffs",
      [build_spec](const ValueFunction& v1, const ValueFunction& v2, double sigma, double rho,
                   const std::string& weight_model, double d, std::size_t n,
                   std::uint64_t seed, const std::string& method) {
        const auto spec = build_spec(v1, v2, sigma, rho, weight_model, d);
        const auto est = expected_refined_payoffs(
            spec, n, RngStream(seed),
            method == "monte-carlo" ? BargainMethod::monte_carlo : BargainMethod::exhaustive);
        py::dict out;
        out["baseline"] = py::make_tuple(est.baseline1, est.baseline2);
        out["mean"] = py::make_tuple(est.mean1, est.mean2);
        out["std_error"] = py::make_tuple(est.se1, est.se2);
        py::list realizations;
        for (const auto& r : est.realizations) {
          py::dict row;
          row["w1"] = r.w1;
          row["w2"] = r.w2;
          row["prob"] = r.prob;
          row["payoffs"] = py::make_tuple(r.payoff1, r.payoff2);
          row["gains"] = py::make_tuple(r.gain1, r.gain2);
          realizations.append(row);
        }
        out["realizations"] = realizations;
        return out;
      },
      py::arg("v1"), py::arg("v2"), py::arg("sigma"), py::arg("rho"),
      py::arg("weight_model") = "two-point", py::arg("d") = 0.0, py::arg("n") = 0,
      py::arg("seed") = 0, py::arg("method") = "exhaustive");
  m.def(
      "correlation_sweep",
      [build_spec](const ValueFunction& v1, const ValueFunction& v2, double sigma,
                   const std::vector<double>& rhos, double d) {
        const auto spec = build_spec(v1, v2, sigma, 0.0, "two-point", d);
        py::list out;
        for (const auto& row : correlation_sweep(spec, sigma, rhos)) {
          py::dict entry;
          entry["rho"] = row.rho;
          entry["gains"] = py::make_tuple(row.gain1, row.gain2);
          entry["baseline"] = py::make_tuple(row.baseline1, row.baseline2);
          out.append(entry);
        }
        return out;
      },
      py::arg("v1"), py::arg("v2"), py::arg("sigma"), py::arg("rhos"), py::arg("d") = 0.0);
}
