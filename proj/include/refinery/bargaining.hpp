#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "refinery/random.hpp"

namespace refinery {

// Common per-dimension value function: continuous, strictly increasing,
// v(0) = 0. Strictly concave unless linear.
class ValueFunction {
 public:
  enum class Family { linear, power, custom_grid };

  static ValueFunction linear();
  static ValueFunction power(double exponent);  // exponent in (0,1]
  // Piecewise-linear over a uniform grid on [0,1]; values[0] must be 0 and
  // the sequence strictly increasing.
  static ValueFunction custom_grid(std::vector<double> values);

  double operator()(double x) const;
  Family family() const { return family_; }
  double exponent() const { return exponent_; }
  void validate() const;
  std::string name() const;  // "linear", "power:0.5", "grid"

 private:
  Family family_ = Family::linear;
  double exponent_ = 1.0;
  std::vector<double> grid_;
};

struct WeightModel {
  enum class Kind { two_point, independent_uniform };

  Kind kind = Kind::two_point;
  double sigma = 0.5;  // weight standard deviation, in (0, 1/2]
  double rho = 0.0;    // correlation between the two agents' weights

  void validate() const;
};

// Two-agent split of a two-dimensional resource with separable utilities
// U^i = w^i_1 v1 + w^i_2 v2, symmetric disagreement point.
struct BargainingSpec {
  ValueFunction v1 = ValueFunction::linear();
  ValueFunction v2 = ValueFunction::linear();
  std::pair<double, double> d = {0.0, 0.0};
  WeightModel weights;

  void validate() const;
};

struct BargainingSolution {
  std::vector<double> allocation;  // {x} or {x1, x2}
  double payoff1 = 0.0;
  double payoff2 = 0.0;
  double nash_product = 0.0;
};

// Maximizes (u(x)-d1)(u(1-x)-d2) over [0,1] by golden section on the
// unimodal extended objective; symmetric inputs return x = 1/2.
BargainingSolution nash_solution_1d(const ValueFunction& u, std::pair<double, double> d);

// General 1d maximizer over arbitrary utilities (used by the diagonal
// restriction and scale-covariance checks).
BargainingSolution nash_maximize_1d(const std::function<double(double)>& u1,
                                    const std::function<double(double)>& u2,
                                    std::pair<double, double> d);

// Coordinate ascent with per-coordinate golden section, multi-start from
// the box corners, center, and a coarse probe.
BargainingSolution nash_maximize_2d(const std::function<double(double, double)>& u1,
                                    const std::function<double(double, double)>& u2,
                                    std::pair<double, double> d);

// Nash solution of the refined game at realized weights (w^1_1, w^2_1):
// U1 = w1*v1(x1) + (1-w1)*v2(x2), U2 = w2*v1(1-x1) + (1-w2)*v2(1-x2).
BargainingSolution nash_solution_2d(const BargainingSpec& spec,
                                    std::pair<double, double> weights);

// Pre-refinement baseline: the 1d solution under the reflection-consistent
// bundled utility u = (v1+v2)/2.
BargainingSolution bundled_baseline(const BargainingSpec& spec);

struct WeightRealization {
  double w1 = 0.5;
  double w2 = 0.5;
  double prob = 0.0;  // exhaustive only; 0 for Monte Carlo draws
  double payoff1 = 0.0;
  double payoff2 = 0.0;
  double gain1 = 0.0;
  double gain2 = 0.0;
};

enum class BargainMethod { monte_carlo, exhaustive };

struct PayoffEstimate {
  double baseline1 = 0.0;
  double baseline2 = 0.0;
  double mean1 = 0.0;
  double se1 = 0.0;
  double mean2 = 0.0;
  double se2 = 0.0;
  std::size_t n = 0;
  std::vector<WeightRealization> realizations;  // exhaustive only
};

// Expected post-refinement Nash payoffs per agent against the bundled
// baseline. Exhaustive covers the 4-outcome two-point weight joint.
PayoffEstimate expected_refined_payoffs(const BargainingSpec& spec, std::size_t n,
                                        const RngStream& stream, BargainMethod method);

struct SweepRow {
  double rho = 0.0;
  double gain1 = 0.0;
  double gain2 = 0.0;
  double baseline1 = 0.0;
  double baseline2 = 0.0;
};

// Exhaustive two-point evaluation per rho; gains are strictly decreasing
// in rho (verified, tolerance 1e-9) with the maximum at rho = -1.
std::vector<SweepRow> correlation_sweep(const BargainingSpec& spec, double sigma,
                                        const std::vector<double>& rho_list);

}  // namespace refinery
