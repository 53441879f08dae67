#include "refinery/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "refinery/io.hpp"

namespace refinery {

namespace {
constexpr double kMassTol = 1e-9;
constexpr double kMassInvariantTol = 1e-12;
}  // namespace

Proposition::Proposition(std::vector<AtomId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool Proposition::contains(AtomId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool Proposition::disjoint_with(const Proposition& other) const {
  auto it1 = ids_.begin();
  auto it2 = other.ids_.begin();
  while (it1 != ids_.end() && it2 != other.ids_.end()) {
    if (*it1 < *it2) ++it1;
    else if (*it2 < *it1) ++it2;
    else return false;
  }
  return true;
}

Proposition Proposition::unite(const Proposition& other) const {
  std::vector<AtomId> merged;
  merged.reserve(ids_.size() + other.ids_.size());
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(merged));
  Proposition out;
  out.ids_ = std::move(merged);
  return out;
}

void RefinementOutcome::validate() const {
  require(std::isfinite(u1) && std::isfinite(u2), Errc::bad_argument,
          "branch utilities must be finite");
  const double mass = p1 + p2;
  require(p1 > 0.0 && p2 > 0.0 && mass > 0.0 && mass < 1.0,
          Errc::outcome_mass_out_of_range,
          "branch masses must be positive with p1+p2 in (0,1)");
}

std::size_t DecisionProblem::index_of(AtomId id) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].id == id) return i;
  }
  fail(Errc::unknown_atom, "atom id " + std::to_string(id) + " not in algebra");
}

const Proposition& DecisionProblem::act(std::size_t index) const {
  require(index < acts_.size(), Errc::invalid_target,
          "act index " + std::to_string(index) + " out of range");
  return acts_[index];
}

double DecisionProblem::atom_credence(AtomId id) const { return credence_[index_of(id)]; }

double DecisionProblem::atom_desirability(AtomId id) const {
  return desirability_[index_of(id)];
}

const std::string& DecisionProblem::atom_label(AtomId id) const {
  return atoms_[index_of(id)].label;
}

Proposition DecisionProblem::top() const {
  std::vector<AtomId> all;
  all.reserve(atoms_.size());
  for (const Atom& a : atoms_) all.push_back(a.id);
  return Proposition(std::move(all));
}

void DecisionProblem::check_invariants() const {
  require(atoms_.size() == credence_.size() && atoms_.size() == desirability_.size(),
          Errc::internal, "parallel arrays out of sync");
  std::unordered_set<AtomId> seen;
  for (const Atom& a : atoms_) {
    require(seen.insert(a.id).second, Errc::internal, "duplicate atom id");
  }
  double mass = 0.0;
  for (double c : credence_) {
    require(c >= 0.0, Errc::internal, "negative credence");
    mass += c;
  }
  require(std::abs(mass - 1.0) <= kMassInvariantTol, Errc::internal,
          "credence mass " + std::to_string(mass) + " violates unit-mass invariant");
  // acts pairwise disjoint, nonempty, and covering
  std::size_t covered = 0;
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    require(!acts_[i].empty(), Errc::internal, "empty act");
    for (AtomId id : acts_[i].ids()) {
      require(seen.count(id) == 1, Errc::internal, "act references unknown atom");
      covered += 1;
    }
    for (std::size_t j = i + 1; j < acts_.size(); ++j) {
      require(acts_[i].disjoint_with(acts_[j]), Errc::internal, "acts overlap");
    }
  }
  require(covered == atoms_.size(), Errc::internal, "acts do not cover the atom set");
}

DecisionProblem make_problem(const std::vector<std::string>& labels,
                             const std::vector<std::vector<std::size_t>>& act_groups,
                             const std::vector<double>& credence,
                             const std::vector<double>& desirability) {
  const std::size_t n = labels.size();
  require(credence.size() == n && desirability.size() == n, Errc::length_mismatch,
          "labels, credence, and desirability must have equal length");
  require(n > 0, Errc::length_mismatch, "problem needs at least one atom");
  require(!act_groups.empty(), Errc::incomplete_cover, "act partition is empty");

  std::vector<bool> used(n, false);
  for (const auto& group : act_groups) {
    require(!group.empty(), Errc::incomplete_cover, "empty act group");
    for (std::size_t idx : group) {
      require(idx < n, Errc::incomplete_cover,
              "act group index " + std::to_string(idx) + " out of range");
      require(!used[idx], Errc::overlapping_acts,
              "atom index " + std::to_string(idx) + " appears in two acts");
      used[idx] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(used[i], Errc::incomplete_cover,
            "atom index " + std::to_string(i) + " not covered by any act");
  }

  double mass = 0.0;
  for (double c : credence) {
    require(c >= 0.0, Errc::negative_credence, "credences must be nonnegative");
    mass += c;
  }
  require(std::abs(mass - 1.0) <= kMassTol, Errc::length_mismatch,
          "credence mass " + std::to_string(mass) + " must be 1");

  DecisionProblem p;
  p.atoms_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.atoms_.push_back({static_cast<AtomId>(i), labels[i]});
  }
  p.next_id_ = static_cast<AtomId>(n);
  p.credence_ = credence;
  if (mass != 1.0) {
    for (double& c : p.credence_) c /= mass;
  }
  p.desirability_ = desirability;
  p.acts_.reserve(act_groups.size());
  for (const auto& group : act_groups) {
    std::vector<AtomId> ids;
    ids.reserve(group.size());
    for (std::size_t idx : group) ids.push_back(static_cast<AtomId>(idx));
    p.acts_.emplace_back(std::move(ids));
  }
  p.check_invariants();
  return p;
}

double probability(const DecisionProblem& problem, const Proposition& x) {
  double total = 0.0;
  for (AtomId id : x.ids()) total += problem.atom_credence(id);
  return total;
}

double desirability(const DecisionProblem& problem, const Proposition& x) {
  require(!x.empty(), Errc::bottom_proposition, "desirability undefined at bottom");
  double mass = 0.0;
  double weighted = 0.0;
  for (AtomId id : x.ids()) {
    const double c = problem.atom_credence(id);
    mass += c;
    weighted += c * problem.atom_desirability(id);
  }
  require(mass > 0.0, Errc::null_probability, "desirability undefined on null-probability proposition");
  return weighted / mass;
}

double act_probability(const DecisionProblem& problem, std::size_t act_index) {
  return probability(problem, problem.act(act_index));
}

double act_desirability(const DecisionProblem& problem, std::size_t act_index) {
  return desirability(problem, problem.act(act_index));
}

DecisionProblem refine_binary(const DecisionProblem& problem, const SplitSpec& spec) {
  require(spec.target < problem.act_count(), Errc::invalid_target,
          "refinement target " + std::to_string(spec.target) + " out of range");
  spec.outcome.validate();
  const Proposition& target_act = problem.acts()[spec.target];
  const double p0 = probability(problem, target_act);
  const double z = 1.0 - p0 + spec.outcome.p1 + spec.outcome.p2;

  DecisionProblem out;
  out.next_id_ = problem.next_id_;
  out.atoms_.reserve(problem.atom_count() - target_act.size() + 2);
  for (std::size_t i = 0; i < problem.atom_count(); ++i) {
    const Atom& a = problem.atoms()[i];
    if (target_act.contains(a.id)) continue;
    out.atoms_.push_back(a);
    out.credence_.push_back(problem.credence_[i] / z);
    out.desirability_.push_back(problem.desirability_[i]);
  }
  const AtomId id1 = out.next_id_++;
  const AtomId id2 = out.next_id_++;
  out.atoms_.push_back({id1, spec.label1});
  out.credence_.push_back(spec.outcome.p1 / z);
  out.desirability_.push_back(spec.outcome.u1);
  out.atoms_.push_back({id2, spec.label2});
  out.credence_.push_back(spec.outcome.p2 / z);
  out.desirability_.push_back(spec.outcome.u2);

  out.acts_.reserve(problem.act_count() + 1);
  for (std::size_t i = 0; i < problem.act_count(); ++i) {
    if (i == spec.target) {
      out.acts_.push_back(Proposition::singleton(id1));
      out.acts_.push_back(Proposition::singleton(id2));
    } else {
      out.acts_.push_back(problem.acts()[i]);
    }
  }
  out.check_invariants();
  return out;
}

DecisionProblem refine_kary(const DecisionProblem& problem, std::size_t target,
                            const std::vector<KaryBranch>& branches,
                            const std::vector<std::string>& labels) {
  const std::size_t k = branches.size();
  require(k >= 2, Errc::bad_argument, "k-ary refinement needs k >= 2");
  require(labels.size() == k, Errc::length_mismatch,
          "need one label per branch");
  require(target < problem.act_count(), Errc::invalid_target,
          "refinement target out of range");
  double mass = 0.0;
  for (const KaryBranch& b : branches) {
    require(b.mass > 0.0, Errc::outcome_mass_out_of_range, "branch masses must be positive");
    require(std::isfinite(b.utility), Errc::bad_argument, "branch utilities must be finite");
    mass += b.mass;
  }
  require(mass > 0.0 && mass < 1.0, Errc::outcome_mass_out_of_range,
          "total branch mass must lie in (0,1)");

  const Proposition& target_act = problem.acts()[target];
  const double p0 = probability(problem, target_act);
  const double z = 1.0 - p0 + mass;

  DecisionProblem out;
  out.next_id_ = problem.next_id_;
  for (std::size_t i = 0; i < problem.atom_count(); ++i) {
    const Atom& a = problem.atoms()[i];
    if (target_act.contains(a.id)) continue;
    out.atoms_.push_back(a);
    out.credence_.push_back(problem.credence_[i] / z);
    out.desirability_.push_back(problem.desirability_[i]);
  }
  std::vector<AtomId> fresh;
  fresh.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const AtomId id = out.next_id_++;
    fresh.push_back(id);
    out.atoms_.push_back({id, labels[j]});
    out.credence_.push_back(branches[j].mass / z);
    out.desirability_.push_back(branches[j].utility);
  }
  for (std::size_t i = 0; i < problem.act_count(); ++i) {
    if (i == target) {
      for (AtomId id : fresh) out.acts_.push_back(Proposition::singleton(id));
    } else {
      out.acts_.push_back(problem.acts()[i]);
    }
  }
  out.check_invariants();
  return out;
}

DecisionProblem add_catch_all(const DecisionProblem& problem, double credence,
                              double desirability) {
  require(credence > 0.0 && credence < 1.0, Errc::mass_out_of_range,
          "catch-all credence must lie in (0,1)");
  require(std::isfinite(desirability), Errc::bad_argument,
          "catch-all desirability must be finite");
  DecisionProblem out;
  out.next_id_ = problem.next_id_;
  out.atoms_ = problem.atoms();
  out.credence_.reserve(problem.atom_count() + 1);
  for (std::size_t i = 0; i < problem.atom_count(); ++i) {
    out.credence_.push_back(problem.credence_[i] * (1.0 - credence));
  }
  out.desirability_ = problem.desirability_;
  const AtomId id = out.next_id_++;
  out.atoms_.push_back({id, "catch-all"});
  out.credence_.push_back(credence);
  out.desirability_.push_back(desirability);
  out.acts_ = problem.acts();
  out.acts_.push_back(Proposition::singleton(id));
  out.check_invariants();
  return out;
}

std::string problem_to_json(const DecisionProblem& problem) {
  // Hand-rolled writer: fixed field order and 17-significant-digit floats.
  std::ostringstream out;
  out << "{\"atoms\":[";
  const auto& atoms = problem.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out << ",";
    out << json_quote(atoms[i].label);
  }
  out << "],\"credence\":[";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out << ",";
    out << format_double(problem.atom_credence(atoms[i].id));
  }
  out << "],\"desirability\":[";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out << ",";
    out << format_double(problem.atom_desirability(atoms[i].id));
  }
  out << "],\"acts\":[";
  for (std::size_t a = 0; a < problem.act_count(); ++a) {
    if (a) out << ",";
    out << "[";
    bool first = true;
    // emit positional indices into the atoms array
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!problem.acts()[a].contains(atoms[i].id)) continue;
      if (!first) out << ",";
      out << i;
      first = false;
    }
    out << "]";
  }
  out << "]}";
  return out.str();
}

DecisionProblem problem_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("problem document is not valid JSON: ") + e.what());
  }
  try {
    const auto labels = doc.at("atoms").get<std::vector<std::string>>();
    const auto credence = doc.at("credence").get<std::vector<double>>();
    const auto desirability = doc.at("desirability").get<std::vector<double>>();
    const auto groups = doc.at("acts").get<std::vector<std::vector<std::size_t>>>();
    return make_problem(labels, groups, credence, desirability);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("problem document malformed: ") + e.what());
  }
}

}  // namespace refinery
