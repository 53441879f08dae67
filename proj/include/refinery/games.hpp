#pragma once

#include <cstddef>
#include <vector>

#include "refinery/dist.hpp"
#include "refinery/random.hpp"

namespace refinery {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct BimatrixGame {
  Matrix payoff1;
  Matrix payoff2;

  std::size_t rows() const { return payoff1.rows; }
  std::size_t cols() const { return payoff1.cols; }
  void validate() const;
  bool zero_sum(double tol = 0.0) const;
};

struct MixedProfile {
  std::vector<double> row_mix;
  std::vector<double> col_mix;
};

struct Equilibrium {
  MixedProfile profile;
  double payoff1 = 0.0;
  double payoff2 = 0.0;
  // x' (A+B) y; summed cellwise so exact zero-sum games report exactly 0.
  double welfare = 0.0;
};

struct EquilibriumSet {
  std::vector<Equilibrium> equilibria;
  // Set when some support system was singular (duplicated strategies etc.);
  // enumeration still returns every verified equilibrium.
  bool degenerate = false;
};

// 2x2 zero-sum base game with row payoffs
//   [ v      alpha ]
//   [ beta   gamma ]
// (column payoffs are the negations).
struct ZeroSumSpec {
  double v = 1.0;
  double alpha = -1.0;
  double beta = -1.0;
  double gamma = 1.0;

  // Interior mixed equilibrium requires no pure saddle.
  void validate() const;
  BimatrixGame to_game() const;
};

ZeroSumSpec matching_pennies();

struct ZeroSumSolution {
  double value = 0.0;
  MixedProfile profile;
};

// Closed-form interior mixed equilibrium of the 2x2 zero-sum game.
ZeroSumSolution solve_zero_sum_2x2(const ZeroSumSpec& spec);

// Cellwise payoff perturbations for the refined 3x2 game.
// Indexing: eps[player][opponent column j][refined branch k].
struct PerturbationSample {
  double eps[2][2][2] = {};
};

// Row player refines the first row act into two branches: 3x2 game with
// rows (branch1, branch2, original second act); branch cells carry the base
// payoffs plus the perturbations, the untouched row is unperturbed.
BimatrixGame refine_game(const ZeroSumSpec& spec, const PerturbationSample& sample);

// Swaps the players (matrices transposed and exchanged). Column-player
// refinement is transpose -> refine_game -> transpose.
BimatrixGame transpose_game(const BimatrixGame& game);

enum class PerturbationFamily { two_point, gaussian };

// Mean-zero cellwise perturbations; rho couples player 2's term to player
// 1's (rho = -1 reproduces the zero-sum structure exactly).
struct PerturbationModel {
  PerturbationFamily family = PerturbationFamily::two_point;
  double magnitude = 0.5;  // two-point +/-a, or gaussian sd
  double rho = 0.0;

  void validate() const;
};

PerturbationSample sample_perturbation(const PerturbationModel& model, RngStream stream);

// All extreme Nash equilibria by support enumeration (desk-scale games,
// at most 4x4): square support pairs, indifference linear systems,
// nonnegativity, then full best-response verification at 1e-9.
EquilibriumSet enumerate_equilibria(const BimatrixGame& game);

struct WelfareOptimum {
  Equilibrium equilibrium;
  double welfare = 0.0;
};

// Equilibrium maximizing payoff1 + payoff2; ties broken lexicographically
// by (row_mix, col_mix).
WelfareOptimum welfare_optimal_equilibrium(const BimatrixGame& game);

// Agreement classification from the zero-sum escape argument: full
// agreement means both players rank the same branch above the other
// against both opponent columns; E0 is the slice where the untouched act
// dominates the agreed branch for the row player.
enum class AgreementEvent { none, e0, e1 };
AgreementEvent classify_agreement(const ZeroSumSpec& spec, const PerturbationSample& sample);

enum class WelfareMethod { monte_carlo, exhaustive };

struct WelfareEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // zero for the exhaustive method
  double p_full_agreement = 0.0;
  double p_e1 = 0.0;
  std::size_t n = 0;
};

// E[W*] of the refined game. Exhaustive enumerates every two-point sign
// pattern with its probability (2^4 when |rho| = 1, else 2^8) and is exact;
// Monte Carlo samples the perturbation model.
WelfareEstimate expected_refined_welfare(const ZeroSumSpec& spec,
                                         const PerturbationModel& model, std::size_t n,
                                         const RngStream& stream, WelfareMethod method);

// Every joint sign pattern with its probability; the exhaustive evaluator
// and the enumeration oracles both walk this space.
std::vector<std::pair<double, PerturbationSample>> enumerate_two_point_patterns(
    const PerturbationModel& model);

std::string game_to_json(const BimatrixGame& game);

}  // namespace refinery
