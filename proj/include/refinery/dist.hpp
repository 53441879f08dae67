#pragma once

#include <limits>
#include <string>

#include "refinery/random.hpp"

namespace refinery {

// Closed vocabulary of scalar distributions used by refinement and
// perturbation models: point mass, two-point, uniform, truncated gaussian.
struct DistSpec {
  enum class Kind { point, two_point, uniform, gaussian };

  Kind kind = Kind::point;
  double value = 0.0;   // point
  double lo = 0.0;      // two_point low value / uniform lo / gaussian truncation lo
  double hi = 0.0;      // two_point high value / uniform hi / gaussian truncation hi
  double p_hi = 0.5;    // two_point probability of the high value
  double mean_param = 0.0;  // gaussian location
  double sd = 1.0;          // gaussian scale

  static DistSpec point(double v);
  static DistSpec two_point(double lo, double hi, double p_hi = 0.5);
  // Symmetric +/-a two-point, P(+a) = p_plus.
  static DistSpec two_point_sym(double a, double p_plus = 0.5);
  static DistSpec uniform(double lo, double hi);
  static DistSpec gaussian(double mean, double sd,
                           double lo = -std::numeric_limits<double>::infinity(),
                           double hi = std::numeric_limits<double>::infinity());

  void validate() const;
  double sample(RngStream& stream) const;
  // Analytic mean (truncated-normal formula for the gaussian case).
  double mean() const;
  // True when the support is a finite set (point or two_point).
  bool finite_support() const;
  // Support bounds (truncation bounds for gaussian).
  double support_lo() const;
  double support_hi() const;
  // True when every draw is a single value.
  bool degenerate() const;

  std::string describe() const;
};

const char* dist_kind_name(DistSpec::Kind kind);

}  // namespace refinery
