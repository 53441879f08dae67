#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "refinery/errors.hpp"

namespace refinery {

// Finite-support outcome space used by brute-force oracles. The payload
// variant is whatever the consumer enumerates: refinement outcomes, sign
// patterns, weight pairs.
template <typename Payload>
struct DiscreteOutcomeSpace {
  std::vector<std::pair<double, Payload>> outcomes;

  void validate() const {
    double mass = 0.0;
    for (const auto& [p, _] : outcomes) {
      require(p >= 0.0, Errc::bad_argument, "outcome probabilities must be nonnegative");
      mass += p;
    }
    require(std::abs(mass - 1.0) <= 1e-12, Errc::bad_argument,
            "outcome probabilities must sum to 1");
  }
};

template <typename Payload, typename F>
double exact_expectation(const DiscreteOutcomeSpace<Payload>& space, F&& f) {
  space.validate();
  double total = 0.0;
  for (const auto& [p, payload] : space.outcomes) total += p * f(payload);
  return total;
}

struct GridResult1D {
  double x = 0.0;
  double value = 0.0;
  double step = 0.0;  // lattice spacing, the Lipschitz-bound unit
};

struct GridResult2D {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  double step_x = 0.0;
  double step_y = 0.0;
};

// Lattice argmax; ties go to the lowest lattice index.
GridResult1D grid_maximize(const std::function<double(double)>& f, double lo, double hi,
                           std::size_t resolution);

GridResult2D grid_maximize_2d(const std::function<double(double, double)>& f, double x_lo,
                              double x_hi, double y_lo, double y_hi,
                              std::size_t resolution);

}  // namespace refinery
