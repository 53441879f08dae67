#include "refinery/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refinery/io.hpp"
#include "refinery/parallel.hpp"

namespace refinery {

namespace {

constexpr double kMeanTol = 1e-9;

void validate_open_unit(const DistSpec& d, const char* what) {
  require(d.support_lo() > 0.0 && d.support_hi() < 1.0, Errc::bad_argument,
          std::string(what) + " support must lie inside (0,1), got " + d.describe());
}

double draw_open_unit(const DistSpec& d, RngStream& stream) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = d.sample(stream);
    if (x > 0.0 && x < 1.0) return x;
  }
  fail(Errc::degenerate_mass, "draw from " + d.describe() + " stuck outside (0,1)");
}

}  // namespace

void RefinementModel::validate() const {
  require(std::isfinite(u0), Errc::bad_argument, "u0 must be finite");
  require(p0 > 0.0 && p0 < 1.0, Errc::bad_argument, "p0 must lie in (0,1)");
  q_dist.validate();
  spread_dist.validate();
  mass_dist.validate();
  validate_open_unit(q_dist, "q");
  validate_open_unit(mass_dist, "mass");
  require(std::abs(mass_dist.mean() - p0) <= kMeanTol, Errc::bad_argument,
          "mass distribution must average p0; got mean " +
              std::to_string(mass_dist.mean()) + " for p0 " + std::to_string(p0));
}

RefinementModel make_model(double u0, double p0, DistSpec q_dist, DistSpec spread_dist,
                           ReflectionMode mode) {
  return make_model(u0, p0, std::move(q_dist), std::move(spread_dist),
                    DistSpec::point(p0), mode);
}

RefinementModel make_model(double u0, double p0, DistSpec q_dist, DistSpec spread_dist,
                           DistSpec mass_dist, ReflectionMode mode) {
  RefinementModel m;
  m.u0 = u0;
  m.p0 = p0;
  m.q_dist = std::move(q_dist);
  m.spread_dist = std::move(spread_dist);
  m.mass_dist = std::move(mass_dist);
  m.mass_defaulted = (m.mass_dist.kind == DistSpec::Kind::point && m.mass_dist.value == p0);
  m.mode = mode;
  m.validate();
  return m;
}

RefinementOutcome sample_outcome(const RefinementModel& model, RngStream stream) {
  const double q = draw_open_unit(model.q_dist, stream);
  const double delta = model.spread_dist.sample(stream);
  const double q_for_u =
      model.mode == ReflectionMode::per_sample ? q : model.q_dist.mean();
  RefinementOutcome out;
  out.u1 = model.u0 + (1.0 - q_for_u) * delta + model.u1_bias;
  out.u2 = model.u0 - q_for_u * delta;
  const double s = draw_open_unit(model.mass_dist, stream);
  out.p1 = q * s;
  out.p2 = (1.0 - q) * s;
  return out;
}

RrpReport check_rrp(const RefinementModel& model, std::size_t n, const RngStream& stream) {
  require(n >= 1000, Errc::bad_argument, "check_rrp needs n >= 1000");
  std::vector<double> values;
  std::vector<double> masses(n);
  parallel_fill(n, values, [&](std::size_t i) {
    const RefinementOutcome o = sample_outcome(model, stream.sub(i));
    const double q = o.conditional_q();
    masses[i] = o.p1 + o.p2;
    return q * o.u1 + (1.0 - q) * o.u2;
  });
  const MeanStdError value_stats = mean_std_error(values);
  const MeanStdError mass_stats = mean_std_error(masses);
  RrpReport report;
  report.value_mean = value_stats.mean;
  report.value_std_error = value_stats.std_error;
  report.mass_mean = mass_stats.mean;
  report.mass_std_error = mass_stats.std_error;
  // Absolute floor keeps zero-variance (per-sample) models from failing on
  // the last-ulp rounding of the constructing arithmetic.
  const double value_slack = std::max(4.0 * value_stats.std_error,
                                      1e-12 * std::max(1.0, std::abs(model.u0)));
  const double mass_slack = std::max(4.0 * mass_stats.std_error, 1e-12);
  report.pass = std::abs(value_stats.mean - model.u0) <= value_slack &&
                std::abs(mass_stats.mean - model.p0) <= mass_slack;
  return report;
}

double check_uncertainty(const RefinementModel& model, std::size_t n,
                         const RngStream& stream) {
  require(n >= 1000, Errc::bad_argument, "check_uncertainty needs n >= 1000");
  std::vector<double> hits;
  parallel_fill(n, hits, [&](std::size_t i) {
    const RefinementOutcome o = sample_outcome(model, stream.sub(i));
    return std::abs(o.u1 - o.u2) > 1e-12 ? 1.0 : 0.0;
  });
  return pairwise_sum(hits) / static_cast<double>(n);
}

std::vector<NamedModel> builtin_model_battery(double u0, double p0) {
  // Mass windows stay inside (0,1) for any p0.
  const double w = std::min(p0, 1.0 - p0) / 2.0;
  std::vector<NamedModel> battery;
  battery.push_back({"coin-two-point",
                     make_model(u0, p0, DistSpec::point(0.5), DistSpec::two_point_sym(2.0))});
  battery.push_back({"uniform-spread",
                     make_model(u0, p0, DistSpec::point(0.5), DistSpec::uniform(-1.0, 1.0))});
  battery.push_back({"gaussian-spread",
                     make_model(u0, p0, DistSpec::point(0.5), DistSpec::gaussian(0.0, 1.0))});
  battery.push_back({"skewed-q-two-point",
                     make_model(u0, p0, DistSpec::point(0.3), DistSpec::two_point_sym(1.0))});
  battery.push_back({"uniform-q-two-point",
                     make_model(u0, p0, DistSpec::uniform(0.2, 0.8), DistSpec::two_point_sym(2.0),
                                DistSpec::uniform(p0 - w, p0 + w))});
  battery.push_back({"uniform-q-uniform-spread",
                     make_model(u0, p0, DistSpec::uniform(0.1, 0.9), DistSpec::uniform(-2.0, 2.0))});
  battery.push_back({"gaussian-q-gaussian-spread",
                     make_model(u0, p0, DistSpec::gaussian(0.5, 0.15, 0.05, 0.95),
                                DistSpec::gaussian(0.0, 0.5))});
  battery.push_back({"two-point-q-rare-spread",
                     make_model(u0, p0, DistSpec::two_point(0.25, 0.75), DistSpec::two_point_sym(3.0, 0.25),
                                DistSpec::two_point(p0 - w, p0 + w))});
  battery.push_back({"shifted-gaussian-spread",
                     make_model(u0, p0, DistSpec::point(0.5), DistSpec::gaussian(0.5, 1.0))});
  battery.push_back({"positive-spread",
                     make_model(u0, p0, DistSpec::point(0.7), DistSpec::uniform(0.1, 2.0))});
  battery.push_back({"expectation-two-point",
                     make_model(u0, p0, DistSpec::uniform(0.3, 0.7), DistSpec::two_point_sym(1.0),
                                ReflectionMode::expectation)});
  battery.push_back({"expectation-uniform",
                     make_model(u0, p0, DistSpec::gaussian(0.5, 0.1, 0.2, 0.8),
                                DistSpec::uniform(-1.0, 1.0), ReflectionMode::expectation)});
  battery.push_back({"degenerate-point",
                     make_model(u0, p0, DistSpec::point(0.5), DistSpec::point(0.0))});
  battery.push_back({"degenerate-uniform-q",
                     make_model(u0, p0, DistSpec::uniform(0.2, 0.8), DistSpec::point(0.0))});
  return battery;
}

RefinementModel builtin_model(const std::string& name, double u0, double p0) {
  for (NamedModel& entry : builtin_model_battery(u0, p0)) {
    if (entry.name == name) return entry.model;
  }
  fail(Errc::bad_argument, "unknown builtin model '" + name + "'");
}

std::string dist_to_json(const DistSpec& d) {
  std::ostringstream out;
  out << "{\"type\":" << json_quote(dist_kind_name(d.kind));
  switch (d.kind) {
    case DistSpec::Kind::point:
      out << ",\"value\":" << format_double(d.value);
      break;
    case DistSpec::Kind::two_point:
      out << ",\"lo\":" << format_double(d.lo) << ",\"hi\":" << format_double(d.hi)
          << ",\"p_hi\":" << format_double(d.p_hi);
      break;
    case DistSpec::Kind::uniform:
      out << ",\"lo\":" << format_double(d.lo) << ",\"hi\":" << format_double(d.hi);
      break;
    case DistSpec::Kind::gaussian:
      out << ",\"mean\":" << format_double(d.mean_param) << ",\"sd\":" << format_double(d.sd);
      if (std::isfinite(d.lo)) out << ",\"lo\":" << format_double(d.lo);
      if (std::isfinite(d.hi)) out << ",\"hi\":" << format_double(d.hi);
      break;
  }
  out << "}";
  return out.str();
}

namespace {

DistSpec dist_from_json(const nlohmann::json& doc) {
  const std::string type = doc.at("type").get<std::string>();
  if (type == "point") return DistSpec::point(doc.at("value").get<double>());
  if (type == "two-point") {
    return DistSpec::two_point(doc.at("lo").get<double>(), doc.at("hi").get<double>(),
                               doc.value("p_hi", 0.5));
  }
  if (type == "uniform") {
    return DistSpec::uniform(doc.at("lo").get<double>(), doc.at("hi").get<double>());
  }
  if (type == "gaussian") {
    return DistSpec::gaussian(doc.at("mean").get<double>(), doc.at("sd").get<double>(),
                              doc.value("lo", -std::numeric_limits<double>::infinity()),
                              doc.value("hi", std::numeric_limits<double>::infinity()));
  }
  fail(Errc::bad_argument, "unknown distribution type '" + type + "'");
}

}  // namespace

DistSpec dist_from_json_text(const std::string& text) {
  try {
    return dist_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("distribution spec malformed: ") + e.what());
  }
}

std::string model_to_json(const RefinementModel& model) {
  std::ostringstream out;
  out << "{\"u0\":" << format_double(model.u0) << ",\"p0\":" << format_double(model.p0)
      << ",\"q\":" << dist_to_json(model.q_dist)
      << ",\"spread\":" << dist_to_json(model.spread_dist)
      << ",\"mass\":" << dist_to_json(model.mass_dist) << ",\"mode\":"
      << (model.mode == ReflectionMode::per_sample ? "\"per-sample\"" : "\"expectation\"");
  if (model.u1_bias != 0.0) out << ",\"u1_bias\":" << format_double(model.u1_bias);
  out << "}";
  return out.str();
}

RefinementModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    const double u0 = doc.at("u0").get<double>();
    const double p0 = doc.at("p0").get<double>();
    const DistSpec q = dist_from_json(doc.at("q"));
    const DistSpec spread = dist_from_json(doc.at("spread"));
    const DistSpec mass =
        doc.contains("mass") ? dist_from_json(doc.at("mass")) : DistSpec::point(p0);
    const std::string mode_text = doc.value("mode", "per-sample");
    ReflectionMode mode;
    if (mode_text == "per-sample") mode = ReflectionMode::per_sample;
    else if (mode_text == "expectation") mode = ReflectionMode::expectation;
    else fail(Errc::bad_argument, "unknown reflection mode '" + mode_text + "'");
    RefinementModel model = make_model(u0, p0, q, spread, mass, mode);
    model.u1_bias = doc.value("u1_bias", 0.0);
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_argument, std::string("model document malformed: ") + e.what());
  }
}

}  // namespace refinery
