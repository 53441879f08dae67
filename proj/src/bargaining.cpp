#include "refinery/bargaining.hpp"

#include <algorithm>
#include <cmath>

#include "refinery/errors.hpp"
#include "refinery/parallel.hpp"

namespace refinery {

namespace {

constexpr double kPayoffTol = 1e-9;
// Fixed golden-section iteration count: brackets shrink below 1e-13.
constexpr int kGoldenIters = 150;
constexpr double kInvPhi = 0.6180339887498949;

// Extended objective: the Nash product where both gains are positive,
// otherwise the smaller gain. Increasing-then-decreasing along any slice
// on which one utility rises and the other falls, so golden section works
// across the feasibility boundary.
double extended_product(double g1, double g2) {
  if (g1 > 0.0 && g2 > 0.0) return g1 * g2;
  return std::min(g1, g2);
}

double golden_section(const std::function<double(double)>& h, double lo, double hi) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double hc = h(c);
  double hd = h(d);
  for (int i = 0; i < kGoldenIters && b - a > 1e-13; ++i) {
    if (hc >= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kInvPhi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kInvPhi * (b - a);
      hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

// Argmax over structured candidates first, then the golden-section result;
// a later candidate must be strictly better to displace an earlier one.
// Putting exact points (endpoints, midpoint) first pins symmetric and
// corner optima without solver fuzz.
double best_candidate_1d(const std::function<double(double)>& h) {
  double best_x = 0.5;
  double best_h = h(0.5);
  for (double x : {0.0, 1.0, golden_section(h, 0.0, 1.0)}) {
    const double hx = h(x);
    if (hx > best_h) {
      best_h = hx;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

ValueFunction ValueFunction::linear() {
  ValueFunction f;
  f.family_ = Family::linear;
  return f;
}

ValueFunction ValueFunction::power(double exponent) {
  ValueFunction f;
  f.family_ = Family::power;
  f.exponent_ = exponent;
  f.validate();
  return f;
}

ValueFunction ValueFunction::custom_grid(std::vector<double> values) {
  ValueFunction f;
  f.family_ = Family::custom_grid;
  f.grid_ = std::move(values);
  f.validate();
  return f;
}

void ValueFunction::validate() const {
  switch (family_) {
    case Family::linear:
      break;
    case Family::power:
      require(exponent_ > 0.0 && exponent_ <= 1.0, Errc::bad_argument,
              "power exponent must lie in (0,1]");
      break;
    case Family::custom_grid:
      require(grid_.size() >= 2, Errc::bad_argument, "grid needs at least two points");
      require(grid_.front() == 0.0, Errc::bad_argument, "grid value at 0 must be 0");
      for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        require(grid_[i] < grid_[i + 1], Errc::bad_argument,
                "grid values must be strictly increasing");
      }
      break;
  }
}

double ValueFunction::operator()(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  switch (family_) {
    case Family::linear:
      return x;
    case Family::power:
      if (exponent_ == 1.0) return x;
      if (exponent_ == 0.5) return std::sqrt(x);
      return std::pow(x, exponent_);
    case Family::custom_grid: {
      const double t = x * static_cast<double>(grid_.size() - 1);
      const std::size_t i = std::min(static_cast<std::size_t>(t), grid_.size() - 2);
      const double frac = t - static_cast<double>(i);
      return grid_[i] + frac * (grid_[i + 1] - grid_[i]);
    }
  }
  return x;
}

std::string ValueFunction::name() const {
  switch (family_) {
    case Family::linear: return "linear";
    case Family::power: {
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "power:%g", exponent_);
      return buffer;
    }
    case Family::custom_grid: return "grid";
  }
  return "?";
}

void WeightModel::validate() const {
  require(sigma > 0.0 && sigma <= 0.5, Errc::bad_argument, "sigma must lie in (0, 1/2]");
  require(rho >= -1.0 && rho <= 1.0, Errc::bad_argument, "rho must lie in [-1,1]");
  if (kind == Kind::independent_uniform) {
    require(rho == 0.0, Errc::bad_argument, "independent-uniform weights imply rho = 0");
    require(std::sqrt(3.0) * sigma <= 0.5 + 1e-12, Errc::bad_argument,
            "sigma-matched uniform needs sqrt(3)*sigma <= 1/2 to keep weights in [0,1]");
  }
}

void BargainingSpec::validate() const {
  v1.validate();
  v2.validate();
  weights.validate();
  require(d.first == d.second, Errc::bad_argument, "disagreement point must be symmetric");
  require(std::isfinite(d.first), Errc::bad_argument, "disagreement point must be finite");
}

BargainingSolution nash_maximize_1d(const std::function<double(double)>& u1,
                                    const std::function<double(double)>& u2,
                                    std::pair<double, double> d) {
  auto h = [&](double x) { return extended_product(u1(x) - d.first, u2(x) - d.second); };
  const double x = best_candidate_1d(h);
  const double g1 = u1(x) - d.first;
  const double g2 = u2(x) - d.second;
  require(g1 > 0.0 && g2 > 0.0, Errc::infeasible_disagreement,
          "no feasible point strictly dominates the disagreement point");
  BargainingSolution out;
  out.allocation = {x};
  out.payoff1 = u1(x);
  out.payoff2 = u2(x);
  out.nash_product = g1 * g2;
  return out;
}

BargainingSolution nash_solution_1d(const ValueFunction& u, std::pair<double, double> d) {
  u.validate();
  return nash_maximize_1d([&](double x) { return u(x); },
                          [&](double x) { return u(1.0 - x); }, d);
}

BargainingSolution nash_maximize_2d(const std::function<double(double, double)>& u1,
                                    const std::function<double(double, double)>& u2,
                                    std::pair<double, double> d) {
  auto h = [&](double x1, double x2) {
    return extended_product(u1(x1, x2) - d.first, u2(x1, x2) - d.second);
  };

  auto ascend = [&](double x1, double x2) {
    double p1 = u1(x1, x2);
    double p2 = u2(x1, x2);
    for (int sweep = 0; sweep < 200; ++sweep) {
      x1 = best_candidate_1d([&](double t) { return h(t, x2); });
      x2 = best_candidate_1d([&](double t) { return h(x1, t); });
      const double n1 = u1(x1, x2);
      const double n2 = u2(x1, x2);
      const double moved = std::max(std::abs(n1 - p1), std::abs(n2 - p2));
      p1 = n1;
      p2 = n2;
      if (moved < kPayoffTol && sweep > 0) break;
    }
    return std::pair<double, double>{x1, x2};
  };

  // Structured candidates first (strict displacement keeps exact corner and
  // center solutions exact), then converged ascents from each start.
  std::vector<std::pair<double, double>> candidates = {
      {0.5, 0.5}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};

  // Coarse probe start guards against ascent stalling outside the
  // feasible region.
  double probe_best = -std::numeric_limits<double>::infinity();
  std::pair<double, double> probe{0.5, 0.5};
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double x1 = i / 40.0;
      const double x2 = j / 40.0;
      const double hx = h(x1, x2);
      if (hx > probe_best) {
        probe_best = hx;
        probe = {x1, x2};
      }
    }
  }

  const std::vector<std::pair<double, double>> starts = candidates;
  for (const auto& [sx, sy] : starts) candidates.push_back(ascend(sx, sy));
  candidates.push_back(ascend(probe.first, probe.second));

  std::pair<double, double> best = candidates[0];
  double best_h = h(best.first, best.second);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double hx = h(candidates[i].first, candidates[i].second);
    if (hx > best_h) {
      best_h = hx;
      best = candidates[i];
    }
  }

  const double g1 = u1(best.first, best.second) - d.first;
  const double g2 = u2(best.first, best.second) - d.second;
  require(g1 > 0.0 && g2 > 0.0, Errc::infeasible_disagreement,
          "no feasible point strictly dominates the disagreement point");
  BargainingSolution out;
  out.allocation = {best.first, best.second};
  out.payoff1 = u1(best.first, best.second);
  out.payoff2 = u2(best.first, best.second);
  out.nash_product = g1 * g2;
  return out;
}

BargainingSolution nash_solution_2d(const BargainingSpec& spec,
                                    std::pair<double, double> weights) {
  spec.validate();
  require(weights.first >= 0.0 && weights.first <= 1.0 && weights.second >= 0.0 &&
              weights.second <= 1.0,
          Errc::bad_argument, "weights must lie in [0,1]");
  const double w1 = weights.first;
  const double w2 = weights.second;
  return nash_maximize_2d(
      [&](double x1, double x2) { return w1 * spec.v1(x1) + (1.0 - w1) * spec.v2(x2); },
      [&](double x1, double x2) {
        return w2 * spec.v1(1.0 - x1) + (1.0 - w2) * spec.v2(1.0 - x2);
      },
      spec.d);
}

BargainingSolution bundled_baseline(const BargainingSpec& spec) {
  spec.validate();
  auto u = [&](double x) { return 0.5 * (spec.v1(x) + spec.v2(x)); };
  return nash_maximize_1d([&](double x) { return u(x); },
                          [&](double x) { return u(1.0 - x); }, spec.d);
}

namespace {

// Joint distribution of the two-point weight model: same side with
// probability (1+rho)/2.
std::vector<WeightRealization> two_point_joint(const WeightModel& wm) {
  const double hi = 0.5 + wm.sigma;
  const double lo = 0.5 - wm.sigma;
  const double p_same = (1.0 + wm.rho) / 4.0;
  const double p_diff = (1.0 - wm.rho) / 4.0;
  return {
      {hi, hi, p_same}, {lo, lo, p_same}, {hi, lo, p_diff}, {lo, hi, p_diff}};
}

}  // namespace

PayoffEstimate expected_refined_payoffs(const BargainingSpec& spec, std::size_t n,
                                        const RngStream& stream, BargainMethod method) {
  spec.validate();
  const BargainingSolution base = bundled_baseline(spec);
  PayoffEstimate out;
  out.baseline1 = base.payoff1;
  out.baseline2 = base.payoff2;

  if (method == BargainMethod::exhaustive) {
    require(spec.weights.kind == WeightModel::Kind::two_point, Errc::exhaustive_unavailable,
            "exhaustive evaluation needs the two-point weight model");
    double mean1 = 0.0;
    double mean2 = 0.0;
    for (WeightRealization r : two_point_joint(spec.weights)) {
      if (r.prob == 0.0) continue;
      const BargainingSolution sol = nash_solution_2d(spec, {r.w1, r.w2});
      r.payoff1 = sol.payoff1;
      r.payoff2 = sol.payoff2;
      r.gain1 = sol.payoff1 - base.payoff1;
      r.gain2 = sol.payoff2 - base.payoff2;
      mean1 += r.prob * sol.payoff1;
      mean2 += r.prob * sol.payoff2;
      out.realizations.push_back(r);
    }
    out.mean1 = mean1;
    out.mean2 = mean2;
    out.n = out.realizations.size();
    return out;
  }

  require(n >= 1, Errc::bad_argument, "need n >= 1 samples");
  std::vector<double> payoffs1;
  std::vector<double> payoffs2(n);
  parallel_fill(n, payoffs1, [&](std::size_t i) {
    RngStream sample_stream = stream.sub(i);
    double w1, w2;
    if (spec.weights.kind == WeightModel::Kind::two_point) {
      const double hi = 0.5 + spec.weights.sigma;
      const double lo = 0.5 - spec.weights.sigma;
      const bool side1 = sample_stream.bernoulli(0.5);
      const bool same = sample_stream.bernoulli((1.0 + spec.weights.rho) / 2.0);
      w1 = side1 ? hi : lo;
      w2 = (same == side1) ? hi : lo;
    } else {
      const double half_width = std::sqrt(3.0) * spec.weights.sigma;
      w1 = sample_stream.uniform(0.5 - half_width, 0.5 + half_width);
      w2 = sample_stream.uniform(0.5 - half_width, 0.5 + half_width);
    }
    const BargainingSolution sol = nash_solution_2d(spec, {w1, w2});
    payoffs2[i] = sol.payoff2;
    return sol.payoff1;
  });
  const MeanStdError s1 = mean_std_error(payoffs1);
  const MeanStdError s2 = mean_std_error(payoffs2);
  out.mean1 = s1.mean;
  out.se1 = s1.std_error;
  out.mean2 = s2.mean;
  out.se2 = s2.std_error;
  out.n = n;
  return out;
}

std::vector<SweepRow> correlation_sweep(const BargainingSpec& spec, double sigma,
                                        const std::vector<double>& rho_list) {
  require(!rho_list.empty(), Errc::bad_argument, "empty rho list");
  for (std::size_t i = 0; i < rho_list.size(); ++i) {
    require(rho_list[i] >= -1.0 && rho_list[i] <= 1.0, Errc::bad_argument,
            "rho must lie in [-1,1]");
    if (i + 1 < rho_list.size()) {
      require(rho_list[i] < rho_list[i + 1], Errc::bad_argument,
              "rho list must be strictly ascending");
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(rho_list.size());
  for (double rho : rho_list) {
    BargainingSpec variant = spec;
    variant.weights.kind = WeightModel::Kind::two_point;
    variant.weights.sigma = sigma;
    variant.weights.rho = rho;
    const PayoffEstimate est =
        expected_refined_payoffs(variant, 0, RngStream(0), BargainMethod::exhaustive);
    SweepRow row;
    row.rho = rho;
    row.gain1 = est.mean1 - est.baseline1;
    row.gain2 = est.mean2 - est.baseline2;
    row.baseline1 = est.baseline1;
    row.baseline2 = est.baseline2;
    rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    require(rows[i].gain1 > rows[i + 1].gain1 - 1e-9 &&
                rows[i].gain2 > rows[i + 1].gain2 - 1e-9,
            Errc::internal, "sweep gains failed to decrease in rho");
  }
  return rows;
}

}  // namespace refinery
