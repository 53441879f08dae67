#include "refinery/errors.hpp"

namespace refinery {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::overlapping_acts: return "OverlappingActs";
    case Errc::incomplete_cover: return "IncompleteCover";
    case Errc::negative_credence: return "NegativeCredence";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::unknown_atom: return "UnknownAtom";
    case Errc::bottom_proposition: return "BottomProposition";
    case Errc::null_probability: return "NullProbability";
    case Errc::invalid_target: return "InvalidTarget";
    case Errc::outcome_mass_out_of_range: return "OutcomeMassOutOfRange";
    case Errc::mass_out_of_range: return "MassOutOfRange";
    case Errc::degenerate_mass: return "DegenerateMass";
    case Errc::model_mismatch: return "ModelMismatch";
    case Errc::not_vanishing_returns: return "NotVanishingReturns";
    case Errc::not_a_dilemma: return "NotADilemma";
    case Errc::bad_simplex: return "BadSimplex";
    case Errc::pure_saddle: return "PureSaddle";
    case Errc::no_equilibrium_found: return "NoEquilibriumFound";
    case Errc::exhaustive_unavailable: return "ExhaustiveUnavailable";
    case Errc::infeasible_disagreement: return "InfeasibleDisagreement";
    case Errc::io_failure: return "IoFailure";
    case Errc::bad_argument: return "BadArgument";
    case Errc::internal: return "InternalError";
  }
  return "UnknownError";
}

bool Error::is_validation() const {
  switch (code_) {
    case Errc::io_failure:
    case Errc::no_equilibrium_found:
    case Errc::internal:
      return false;
    default:
      return true;
  }
}

}  // namespace refinery
