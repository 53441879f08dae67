#pragma once

#include <string>
#include <vector>

#include "refinery/algebra.hpp"
#include "refinery/dist.hpp"
#include "refinery/random.hpp"

namespace refinery {

enum class ReflectionMode {
  // Every sample satisfies q*u1 + (1-q)*u2 = u0 by construction.
  per_sample,
  // Reflection holds only on analytic average: the convex combination uses
  // the mean of q, so individual samples may miss u0.
  expectation,
};

// Seeded distribution over binary refinement outcomes for an act with
// current desirability u0 and probability p0.
//
// Sampling draws q from q_dist, a utility gap delta from spread_dist, and a
// mass s from mass_dist, then sets
//   u1 = u0 + (1-q)*delta,  u2 = u0 - q*delta,  p1 = q*s,  p2 = (1-q)*s
// (per-sample mode; expectation mode replaces q by its mean in the u's).
// mass_dist must average p0 so probability is preserved in expectation.
struct RefinementModel {
  double u0 = 0.0;
  double p0 = 0.5;
  DistSpec q_dist = DistSpec::point(0.5);
  DistSpec spread_dist = DistSpec::point(0.0);
  DistSpec mass_dist;  // defaulted to point(p0) by make_model / validate
  ReflectionMode mode = ReflectionMode::per_sample;
  bool mass_defaulted = true;
  // Fault-injection knob for the RRP checker: added to u1 after
  // construction, breaking reflection when nonzero.
  double u1_bias = 0.0;

  void validate() const;
};

RefinementModel make_model(double u0, double p0, DistSpec q_dist, DistSpec spread_dist,
                           ReflectionMode mode = ReflectionMode::per_sample);
RefinementModel make_model(double u0, double p0, DistSpec q_dist, DistSpec spread_dist,
                           DistSpec mass_dist,
                           ReflectionMode mode = ReflectionMode::per_sample);

RefinementOutcome sample_outcome(const RefinementModel& model, RngStream stream);

struct RrpReport {
  double value_mean = 0.0;
  double value_std_error = 0.0;
  double mass_mean = 0.0;
  double mass_std_error = 0.0;
  bool pass = false;
};

// Monte Carlo check that q*u1+(1-q)*u2 averages to u0 and p1+p2 to p0,
// both within four standard errors.
RrpReport check_rrp(const RefinementModel& model, std::size_t n, const RngStream& stream);

// Estimated Pr(u1 != u2): fraction of samples with |u1-u2| > 1e-12.
double check_uncertainty(const RefinementModel& model, std::size_t n,
                         const RngStream& stream);

struct NamedModel {
  std::string name;
  RefinementModel model;
};

// Battery of models spanning the distribution vocabulary, anchored at
// (u0, p0). The last two are degenerate (no refinement uncertainty).
std::vector<NamedModel> builtin_model_battery(double u0, double p0);

// Fails with BadArgument if `name` is unknown.
RefinementModel builtin_model(const std::string& name, double u0, double p0);

std::string model_to_json(const RefinementModel& model);
RefinementModel model_from_json(const std::string& text);

std::string dist_to_json(const DistSpec& dist);
DistSpec dist_from_json_text(const std::string& text);

}  // namespace refinery
