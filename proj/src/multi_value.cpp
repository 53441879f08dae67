#include "refinery/multi_value.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refinery/io.hpp"
#include "refinery/parallel.hpp"
#include "refinery/refinement.hpp"

namespace refinery {

void ValueProfile::validate() const {
  require(values.size() >= 2, Errc::bad_argument, "value profile needs k >= 2 dimensions");
  for (const auto& dim : values) {
    require(dim.size() == problem.atom_count(), Errc::length_mismatch,
            "every dimension must value every atom");
    for (double v : dim) {
      require(std::isfinite(v), Errc::bad_argument, "values must be finite");
    }
  }
}

double ValueProfile::act_value(std::size_t dim, std::size_t act_index) const {
  require(dim < values.size(), Errc::bad_argument, "dimension out of range");
  const Proposition& act = problem.act(act_index);
  double mass = 0.0;
  double weighted = 0.0;
  const auto& atoms = problem.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!act.contains(atoms[i].id)) continue;
    const double c = problem.atom_credence(atoms[i].id);
    mass += c;
    weighted += c * values[dim][i];
  }
  require(mass > 0.0, Errc::null_probability, "act value undefined on null probability");
  return weighted / mass;
}

ValueProfile make_profile(DecisionProblem problem, std::vector<std::vector<double>> values) {
  ValueProfile profile{std::move(problem), std::move(values)};
  profile.validate();
  return profile;
}

std::string profile_to_json(const ValueProfile& profile) {
  std::string problem_doc = problem_to_json(profile.problem);
  // splice "values" before the closing brace
  std::ostringstream out;
  out << problem_doc.substr(0, problem_doc.size() - 1) << ",\"values\":[";
  for (std::size_t d = 0; d < profile.values.size(); ++d) {
    if (d) out << ",";
    out << "[";
    for (std::size_t i = 0; i < profile.values[d].size(); ++i) {
      if (i) out << ",";
      out << format_double(profile.values[d][i]);
    }
    out << "]";
  }
  out << "]}";
  return out.str();
}

ValueProfile profile_from_json(const std::string& text) {
  DecisionProblem problem = problem_from_json(text);
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    auto values = doc.at("values").get<std::vector<std::vector<double>>>();
    return make_profile(std::move(problem), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("profile document malformed: ") + e.what());
  }
}

void JointRefinementModel::validate() const {
  require(u0.size() >= 2, Errc::bad_argument, "joint model needs k >= 2 dimensions");
  require(p0 > 0.0 && p0 < 1.0, Errc::bad_argument, "p0 must lie in (0,1)");
  q_dist.validate();
  require(q_dist.support_lo() > 0.0 && q_dist.support_hi() < 1.0, Errc::bad_argument,
          "q support must lie inside (0,1)");
  if (coupling == JointCoupling::explicit_joint) {
    require(!outcomes.empty(), Errc::bad_argument, "explicit joint needs outcomes");
    double mass = 0.0;
    const double q_mean = q_dist.mean();
    std::vector<double> reflected(u0.size(), 0.0);
    for (const auto& [p, branch_values] : outcomes) {
      require(p >= 0.0, Errc::bad_argument, "outcome probabilities must be nonnegative");
      require(branch_values.size() == u0.size(), Errc::length_mismatch,
              "every outcome must cover every dimension");
      mass += p;
      for (std::size_t d = 0; d < u0.size(); ++d) {
        reflected[d] += p * (q_mean * branch_values[d].first +
                             (1.0 - q_mean) * branch_values[d].second);
      }
    }
    require(std::abs(mass - 1.0) <= 1e-12, Errc::bad_argument,
            "explicit joint probabilities must sum to 1");
    for (std::size_t d = 0; d < u0.size(); ++d) {
      require(std::abs(reflected[d] - u0[d]) <= 1e-9, Errc::bad_argument,
              "explicit joint violates reflection on dimension " + std::to_string(d));
    }
  } else {
    require(!spreads.empty(), Errc::bad_argument, "need at least one spread spec");
    if (coupling == JointCoupling::independent) {
      require(spreads.size() == u0.size(), Errc::length_mismatch,
              "independent coupling needs one spread per dimension");
    }
    for (const DistSpec& s : spreads) s.validate();
  }
}

JointOutcome sample_joint(const JointRefinementModel& model, RngStream stream) {
  JointOutcome out;
  // q first so outcome draws line up across couplings
  double q = model.q_dist.sample(stream);
  while (q <= 0.0 || q >= 1.0) q = model.q_dist.sample(stream);
  out.q = q;
  out.branch_values.resize(model.u0.size());
  switch (model.coupling) {
    case JointCoupling::independent: {
      for (std::size_t d = 0; d < model.u0.size(); ++d) {
        const double delta = model.spreads[d].sample(stream);
        out.branch_values[d] = {model.u0[d] + (1.0 - q) * delta, model.u0[d] - q * delta};
      }
      break;
    }
    case JointCoupling::common_spread: {
      const double delta = model.spreads[0].sample(stream);
      for (std::size_t d = 0; d < model.u0.size(); ++d) {
        out.branch_values[d] = {model.u0[d] + (1.0 - q) * delta, model.u0[d] - q * delta};
      }
      break;
    }
    case JointCoupling::explicit_joint: {
      std::vector<double> probs;
      probs.reserve(model.outcomes.size());
      for (const auto& [p, _] : model.outcomes) probs.push_back(p);
      const std::size_t pick = stream.categorical(probs);
      out.branch_values = model.outcomes[pick].second;
      break;
    }
  }
  return out;
}

bool detect_dilemma(const ValueProfile& profile, std::size_t actA, std::size_t actNotA) {
  profile.validate();
  require(actA != actNotA, Errc::bad_argument, "the two acts must differ");
  const std::size_t k = profile.dims();
  if (k == 2) {
    return profile.act_value(0, actA) > profile.act_value(0, actNotA) &&
           profile.act_value(1, actA) < profile.act_value(1, actNotA);
  }
  bool a_weakly_dominates = true;
  bool not_a_weakly_dominates = true;
  for (std::size_t d = 0; d < k; ++d) {
    const double va = profile.act_value(d, actA);
    const double vn = profile.act_value(d, actNotA);
    if (va < vn) a_weakly_dominates = false;
    if (vn < va) not_a_weakly_dominates = false;
  }
  return !a_weakly_dominates && !not_a_weakly_dominates;
}

bool multi_value_dominates(std::size_t candidate, std::span<const std::size_t> others,
                           const ValueProfile& profile) {
  for (std::size_t o : others) {
    require(o != candidate, Errc::bad_argument, "candidate cannot be among the rivals");
  }
  if (others.empty()) return false;
  bool some_strict = false;
  for (std::size_t d = 0; d < profile.dims(); ++d) {
    const double vc = profile.act_value(d, candidate);
    double rival_best = -std::numeric_limits<double>::infinity();
    for (std::size_t o : others) rival_best = std::max(rival_best, profile.act_value(d, o));
    if (vc < rival_best) return false;
    if (vc > rival_best) some_strict = true;
  }
  return some_strict;
}

DominanceEvent classify_joint_outcome(const JointOutcome& outcome,
                                      std::span<const double> rival_values) {
  const std::size_t k = outcome.branch_values.size();
  require(rival_values.size() == k, Errc::length_mismatch,
          "rival values must cover every dimension");
  auto dominates = [&](bool first_branch) {
    bool some_strict = false;
    for (std::size_t d = 0; d < k; ++d) {
      const double mine =
          first_branch ? outcome.branch_values[d].first : outcome.branch_values[d].second;
      const double other =
          first_branch ? outcome.branch_values[d].second : outcome.branch_values[d].first;
      const double rival = std::max(rival_values[d], other);
      if (mine < rival) return false;
      if (mine > rival) some_strict = true;
    }
    return some_strict;
  };
  const bool b1 = dominates(true);
  const bool b2 = dominates(false);
  require(!(b1 && b2), Errc::internal, "dominance events must be disjoint");
  if (b1) return DominanceEvent::branch1;
  if (b2) return DominanceEvent::branch2;
  return DominanceEvent::none;
}

ResolutionEstimate resolution_probability(const ValueProfile& profile, std::size_t actA,
                                          std::size_t actNotA,
                                          const JointRefinementModel& joint, std::size_t n,
                                          const RngStream& stream) {
  require(n >= 1, Errc::bad_argument, "need n >= 1 samples");
  joint.validate();
  require(detect_dilemma(profile, actA, actNotA), Errc::not_a_dilemma,
          "acts do not form a dilemma");
  require(joint.u0.size() == profile.dims(), Errc::length_mismatch,
          "joint model dimension count disagrees with profile");
  for (std::size_t d = 0; d < profile.dims(); ++d) {
    require(std::abs(joint.u0[d] - profile.act_value(d, actA)) <= 1e-9,
            Errc::model_mismatch, "joint model not anchored at the refined act's values");
  }
  std::vector<double> rivals(profile.dims());
  for (std::size_t d = 0; d < profile.dims(); ++d) rivals[d] = profile.act_value(d, actNotA);

  std::vector<double> hits;
  parallel_fill(n, hits, [&](std::size_t i) {
    const JointOutcome outcome = sample_joint(joint, stream.sub(i));
    return classify_joint_outcome(outcome, rivals) == DominanceEvent::none ? 0.0 : 1.0;
  });
  ResolutionEstimate est;
  est.prob = pairwise_sum(hits) / static_cast<double>(n);
  est.std_error = std::sqrt(est.prob * (1.0 - est.prob) / static_cast<double>(n));
  return est;
}

std::string joint_to_json(const JointRefinementModel& model) {
  std::ostringstream out;
  out << "{\"u0\":[";
  for (std::size_t d = 0; d < model.u0.size(); ++d) {
    if (d) out << ",";
    out << format_double(model.u0[d]);
  }
  out << "],\"p0\":" << format_double(model.p0) << ",\"q\":" << dist_to_json(model.q_dist)
      << ",\"coupling\":";
  switch (model.coupling) {
    case JointCoupling::independent: out << "\"independent\""; break;
    case JointCoupling::common_spread: out << "\"common-spread\""; break;
    case JointCoupling::explicit_joint: out << "\"explicit\""; break;
  }
  if (model.coupling == JointCoupling::explicit_joint) {
    out << ",\"outcomes\":[";
    for (std::size_t i = 0; i < model.outcomes.size(); ++i) {
      if (i) out << ",";
      out << "{\"p\":" << format_double(model.outcomes[i].first) << ",\"values\":[";
      for (std::size_t d = 0; d < model.outcomes[i].second.size(); ++d) {
        if (d) out << ",";
        out << "[" << format_double(model.outcomes[i].second[d].first) << ","
            << format_double(model.outcomes[i].second[d].second) << "]";
      }
      out << "]}";
    }
    out << "]";
  } else {
    out << ",\"spreads\":[";
    for (std::size_t i = 0; i < model.spreads.size(); ++i) {
      if (i) out << ",";
      out << dist_to_json(model.spreads[i]);
    }
    out << "]";
  }
  out << "}";
  return out.str();
}

JointRefinementModel joint_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("joint model is not valid JSON: ") + e.what());
  }
  try {
    JointRefinementModel model;
    model.u0 = doc.at("u0").get<std::vector<double>>();
    model.p0 = doc.at("p0").get<double>();
    if (doc.contains("q")) model.q_dist = dist_from_json_text(doc.at("q").dump());
    const std::string coupling = doc.value("coupling", "independent");
    if (coupling == "independent") model.coupling = JointCoupling::independent;
    else if (coupling == "common-spread") model.coupling = JointCoupling::common_spread;
    else if (coupling == "explicit") model.coupling = JointCoupling::explicit_joint;
    else fail(Errc::bad_argument, "unknown coupling '" + coupling + "'");
    if (model.coupling == JointCoupling::explicit_joint) {
      for (const auto& entry : doc.at("outcomes")) {
        std::vector<std::pair<double, double>> values;
        for (const auto& pair : entry.at("values")) {
          values.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
        model.outcomes.emplace_back(entry.at("p").get<double>(), std::move(values));
      }
    } else {
      for (const auto& spread : doc.at("spreads")) {
        model.spreads.push_back(dist_from_json_text(spread.dump()));
      }
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("joint model malformed: ") + e.what());
  }
}

double aggregate_utility(std::span<const double> values, std::span<const double> weights) {
  require(values.size() == weights.size(), Errc::length_mismatch,
          "values and weights must have equal length");
  double mass = 0.0;
  for (double w : weights) {
    require(w >= 0.0, Errc::bad_simplex, "weights must be nonnegative");
    mass += w;
  }
  require(std::abs(mass - 1.0) <= 1e-12, Errc::bad_simplex, "weights must sum to 1");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += weights[i] * values[i];
  return total;
}

}  // namespace refinery
