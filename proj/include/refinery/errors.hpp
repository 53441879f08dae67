#pragma once

#include <stdexcept>
#include <string>

namespace refinery {

// Error codes for every failure mode the library reports. Validation-class
// codes map to CLI exit 2, runtime-class codes to exit 3.
enum class Errc {
  // problem construction / algebra
  overlapping_acts,
  incomplete_cover,
  negative_credence,
  length_mismatch,
  unknown_atom,
  bottom_proposition,
  null_probability,
  invalid_target,
  outcome_mass_out_of_range,
  mass_out_of_range,
  // refinement models
  degenerate_mass,
  model_mismatch,
  // single agent
  not_vanishing_returns,
  // multi value
  not_a_dilemma,
  bad_simplex,
  // games
  pure_saddle,
  no_equilibrium_found,
  exhaustive_unavailable,
  // bargaining
  infeasible_disagreement,
  // io / misc
  io_failure,
  bad_argument,
  internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

  // True for errors caused by bad input rather than by execution.
  bool is_validation() const;

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace refinery
