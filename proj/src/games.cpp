#include "refinery/games.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "refinery/errors.hpp"
#include "refinery/io.hpp"
#include "refinery/parallel.hpp"

namespace refinery {

namespace {

constexpr double kBestResponseTol = 1e-9;
constexpr double kDedupTol = 1e-7;
constexpr double kSingularTol = 1e-12;

}  // namespace

void BimatrixGame::validate() const {
  require(payoff1.rows == payoff2.rows && payoff1.cols == payoff2.cols, Errc::length_mismatch,
          "payoff matrices must agree in shape");
  require(payoff1.rows >= 1 && payoff1.cols >= 1, Errc::bad_argument, "empty game");
  for (double x : payoff1.data) require(std::isfinite(x), Errc::bad_argument, "payoff not finite");
  for (double x : payoff2.data) require(std::isfinite(x), Errc::bad_argument, "payoff not finite");
}

bool BimatrixGame::zero_sum(double tol) const {
  for (std::size_t i = 0; i < payoff1.data.size(); ++i) {
    if (std::abs(payoff1.data[i] + payoff2.data[i]) > tol) return false;
  }
  return true;
}

void ZeroSumSpec::validate() const {
  require(std::isfinite(v) && std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma),
          Errc::bad_argument, "payoffs must be finite");
  require((v - beta) * (gamma - alpha) > 0.0 && (v - alpha) * (gamma - beta) > 0.0,
          Errc::pure_saddle, "game has a pure saddle point; no interior mixed equilibrium");
}

BimatrixGame ZeroSumSpec::to_game() const {
  BimatrixGame g;
  g.payoff1 = Matrix(2, 2);
  g.payoff2 = Matrix(2, 2);
  g.payoff1.at(0, 0) = v;
  g.payoff1.at(0, 1) = alpha;
  g.payoff1.at(1, 0) = beta;
  g.payoff1.at(1, 1) = gamma;
  for (std::size_t i = 0; i < 4; ++i) g.payoff2.data[i] = -g.payoff1.data[i];
  return g;
}

ZeroSumSpec matching_pennies() { return ZeroSumSpec{1.0, -1.0, -1.0, 1.0}; }

ZeroSumSolution solve_zero_sum_2x2(const ZeroSumSpec& spec) {
  spec.validate();
  const double denom = spec.v - spec.alpha - spec.beta + spec.gamma;
  const double row_a = (spec.gamma - spec.beta) / denom;
  const double col_a = (spec.gamma - spec.alpha) / denom;
  ZeroSumSolution out;
  out.value = (spec.v * spec.gamma - spec.alpha * spec.beta) / denom;
  out.profile.row_mix = {row_a, 1.0 - row_a};
  out.profile.col_mix = {col_a, 1.0 - col_a};
  return out;
}

BimatrixGame refine_game(const ZeroSumSpec& spec, const PerturbationSample& sample) {
  for (const auto& per_player : sample.eps) {
    for (const auto& per_col : per_player) {
      for (double e : per_col) {
        require(std::isfinite(e), Errc::bad_argument, "perturbations must be finite");
      }
    }
  }
  BimatrixGame g;
  g.payoff1 = Matrix(3, 2);
  g.payoff2 = Matrix(3, 2);
  const double base1[2] = {spec.v, spec.alpha};
  const double base2[2] = {-spec.v, -spec.alpha};
  for (std::size_t k = 0; k < 2; ++k) {    // branch row
    for (std::size_t j = 0; j < 2; ++j) {  // opponent column
      g.payoff1.at(k, j) = base1[j] + sample.eps[0][j][k];
      g.payoff2.at(k, j) = base2[j] + sample.eps[1][j][k];
    }
  }
  g.payoff1.at(2, 0) = spec.beta;
  g.payoff1.at(2, 1) = spec.gamma;
  g.payoff2.at(2, 0) = -spec.beta;
  g.payoff2.at(2, 1) = -spec.gamma;
  return g;
}

BimatrixGame transpose_game(const BimatrixGame& game) {
  game.validate();
  BimatrixGame out;
  out.payoff1 = Matrix(game.cols(), game.rows());
  out.payoff2 = Matrix(game.cols(), game.rows());
  for (std::size_t r = 0; r < game.rows(); ++r) {
    for (std::size_t c = 0; c < game.cols(); ++c) {
      out.payoff1.at(c, r) = game.payoff2.at(r, c);
      out.payoff2.at(c, r) = game.payoff1.at(r, c);
    }
  }
  return out;
}

void PerturbationModel::validate() const {
  require(magnitude > 0.0 && std::isfinite(magnitude), Errc::bad_argument,
          "perturbation magnitude must be positive");
  require(rho >= -1.0 && rho <= 1.0, Errc::bad_argument, "correlation must lie in [-1,1]");
}

PerturbationSample sample_perturbation(const PerturbationModel& model, RngStream stream) {
  model.validate();
  PerturbationSample out;
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (model.family == PerturbationFamily::two_point) {
        const double sign1 = stream.bernoulli(0.5) ? 1.0 : -1.0;
        const bool same = stream.bernoulli((1.0 + model.rho) / 2.0);
        out.eps[0][j][k] = sign1 * model.magnitude;
        out.eps[1][j][k] = (same ? sign1 : -sign1) * model.magnitude;
      } else {
        const double z1 = model.magnitude * stream.normal();
        const double z2 = model.magnitude * stream.normal();
        out.eps[0][j][k] = z1;
        out.eps[1][j][k] = model.rho * z1 + std::sqrt(1.0 - model.rho * model.rho) * z2;
      }
    }
  }
  return out;
}

namespace {

// Gaussian elimination with partial pivoting; nullopt on (near-)singular.
std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double x : row) scale = std::max(scale, std::abs(x));
  }
  if (scale == 0.0) scale = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= kSingularTol * scale) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

double mixed_payoff(const Matrix& m, const std::vector<double>& x,
                    const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (x[r] == 0.0) continue;
    double row_value = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) row_value += m.at(r, c) * y[c];
    total += x[r] * row_value;
  }
  return total;
}

bool is_equilibrium(const BimatrixGame& g, const std::vector<double>& x,
                    const std::vector<double>& y) {
  const double v1 = mixed_payoff(g.payoff1, x, y);
  const double v2 = mixed_payoff(g.payoff2, x, y);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double dev = 0.0;
    for (std::size_t c = 0; c < g.cols(); ++c) dev += g.payoff1.at(r, c) * y[c];
    if (dev > v1 + kBestResponseTol) return false;
  }
  for (std::size_t c = 0; c < g.cols(); ++c) {
    double dev = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r) dev += g.payoff2.at(r, c) * x[r];
    if (dev > v2 + kBestResponseTol) return false;
  }
  return true;
}

// Mix over `support` making every pure strategy in `opponent_support`
// indifferent under `m` (m read as: payoff to the opponent when the
// opponent plays the row index). Equations: payoffs equal + mass one.
std::optional<std::vector<double>> indifference_mix(const Matrix& m,
                                                    const std::vector<std::size_t>& support,
                                                    const std::vector<std::size_t>& opponent_support,
                                                    std::size_t full_size, bool transpose) {
  const std::size_t s = support.size();
  std::vector<std::vector<double>> a(s, std::vector<double>(s, 0.0));
  std::vector<double> b(s, 0.0);
  auto entry = [&](std::size_t opp, std::size_t mine) {
    return transpose ? m.at(mine, opp) : m.at(opp, mine);
  };
  for (std::size_t eq = 0; eq + 1 < opponent_support.size(); ++eq) {
    for (std::size_t i = 0; i < s; ++i) {
      a[eq][i] = entry(opponent_support[eq], support[i]) -
                 entry(opponent_support[eq + 1], support[i]);
    }
    b[eq] = 0.0;
  }
  for (std::size_t i = 0; i < s; ++i) a[s - 1][i] = 1.0;
  b[s - 1] = 1.0;
  const auto solved = solve_linear(std::move(a), std::move(b));
  if (!solved) return std::nullopt;
  std::vector<double> mix(full_size, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    double w = (*solved)[i];
    if (w < -kBestResponseTol) return std::nullopt;
    if (w < 0.0) w = 0.0;
    mix[support[i]] = w;
    mass += w;
  }
  if (mass != 1.0) {
    for (double& w : mix) w /= mass;
  }
  return mix;
}

void subsets_of_size(std::size_t n, std::size_t s, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> current;
  // lexicographic recursion
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (current.size() == s) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      current.push_back(i);
      self(self, i + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

double cellwise_welfare(const BimatrixGame& g, const std::vector<double>& x,
                        const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    if (x[r] == 0.0) continue;
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (y[c] == 0.0) continue;
      total += x[r] * y[c] * (g.payoff1.at(r, c) + g.payoff2.at(r, c));
    }
  }
  return total;
}

}  // namespace

EquilibriumSet enumerate_equilibria(const BimatrixGame& game) {
  game.validate();
  require(game.rows() <= 4 && game.cols() <= 4, Errc::bad_argument,
          "support enumeration is limited to 4x4 games");
  EquilibriumSet out;
  const std::size_t max_support = std::min(game.rows(), game.cols());
  for (std::size_t s = 1; s <= max_support; ++s) {
    std::vector<std::vector<std::size_t>> row_supports;
    std::vector<std::vector<std::size_t>> col_supports;
    subsets_of_size(game.rows(), s, row_supports);
    subsets_of_size(game.cols(), s, col_supports);
    for (const auto& rs : row_supports) {
      for (const auto& cs : col_supports) {
        std::optional<std::vector<double>> x;
        std::optional<std::vector<double>> y;
        if (s == 1) {
          x = std::vector<double>(game.rows(), 0.0);
          (*x)[rs[0]] = 1.0;
          y = std::vector<double>(game.cols(), 0.0);
          (*y)[cs[0]] = 1.0;
        } else {
          // y makes the row support indifferent under payoff1; x the
          // column support under payoff2.
          y = indifference_mix(game.payoff1, cs, rs, game.cols(), /*transpose=*/false);
          x = indifference_mix(game.payoff2, rs, cs, game.rows(), /*transpose=*/true);
          if (!x || !y) {
            out.degenerate = true;
            continue;
          }
        }
        if (!is_equilibrium(game, *x, *y)) continue;
        bool duplicate = false;
        for (const Equilibrium& known : out.equilibria) {
          double dist = 0.0;
          for (std::size_t i = 0; i < x->size(); ++i) {
            dist = std::max(dist, std::abs(known.profile.row_mix[i] - (*x)[i]));
          }
          for (std::size_t i = 0; i < y->size(); ++i) {
            dist = std::max(dist, std::abs(known.profile.col_mix[i] - (*y)[i]));
          }
          if (dist <= kDedupTol) {
            duplicate = true;
            break;
          }
        }
        if (duplicate) continue;
        Equilibrium eq;
        eq.profile.row_mix = *x;
        eq.profile.col_mix = *y;
        eq.payoff1 = mixed_payoff(game.payoff1, *x, *y);
        eq.payoff2 = mixed_payoff(game.payoff2, *x, *y);
        eq.welfare = cellwise_welfare(game, *x, *y);
        out.equilibria.push_back(std::move(eq));
      }
    }
  }
  return out;
}

WelfareOptimum welfare_optimal_equilibrium(const BimatrixGame& game) {
  const EquilibriumSet set = enumerate_equilibria(game);
  require(!set.equilibria.empty(), Errc::no_equilibrium_found,
          "support enumeration found no equilibrium");
  auto lex_less = [](const Equilibrium& a, const Equilibrium& b) {
    if (a.profile.row_mix != b.profile.row_mix) return a.profile.row_mix < b.profile.row_mix;
    return a.profile.col_mix < b.profile.col_mix;
  };
  const Equilibrium* best = &set.equilibria.front();
  for (const Equilibrium& eq : set.equilibria) {
    if (eq.welfare > best->welfare + 1e-12 ||
        (std::abs(eq.welfare - best->welfare) <= 1e-12 && lex_less(eq, *best))) {
      best = &eq;
    }
  }
  return {*best, best->welfare};
}

AgreementEvent classify_agreement(const ZeroSumSpec& spec, const PerturbationSample& sample) {
  // d[i][j] > 0 means player i+1 ranks branch 1 above branch 2 against
  // opponent column j.
  bool branch1_agreed = true;
  bool branch2_agreed = true;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double d = sample.eps[i][j][0] - sample.eps[i][j][1];
      if (d <= 0.0) branch1_agreed = false;
      if (d >= 0.0) branch2_agreed = false;
    }
  }
  if (!branch1_agreed && !branch2_agreed) return AgreementEvent::none;
  const std::size_t k_star = branch1_agreed ? 0 : 1;
  // e0: the untouched act weakly dominates the agreed branch for the row
  // player, so equilibrium welfare stays zero.
  const double branch_col0 = spec.v + sample.eps[0][0][k_star];
  const double branch_col1 = spec.alpha + sample.eps[0][1][k_star];
  const bool nota_dominates = spec.beta >= branch_col0 && spec.gamma >= branch_col1;
  return nota_dominates ? AgreementEvent::e0 : AgreementEvent::e1;
}

std::vector<std::pair<double, PerturbationSample>> enumerate_two_point_patterns(
    const PerturbationModel& model) {
  model.validate();
  require(model.family == PerturbationFamily::two_point, Errc::exhaustive_unavailable,
          "exhaustive enumeration needs the two-point family");
  std::vector<std::pair<double, PerturbationSample>> patterns;
  const bool rho_degenerate = model.rho == 1.0 || model.rho == -1.0;
  const double p_same = (1.0 + model.rho) / 2.0;
  const std::size_t sign_patterns = 16;  // player 1's four cells
  const std::size_t agree_patterns = rho_degenerate ? 1 : 16;
  for (std::size_t bits1 = 0; bits1 < sign_patterns; ++bits1) {
    for (std::size_t bits2 = 0; bits2 < agree_patterns; ++bits2) {
      PerturbationSample sample;
      double prob = 1.0;
      std::size_t cell = 0;
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k, ++cell) {
          const double sign1 = (bits1 >> cell) & 1 ? 1.0 : -1.0;
          sample.eps[0][j][k] = sign1 * model.magnitude;
          prob *= 0.5;
          bool same;
          if (rho_degenerate) {
            same = model.rho == 1.0;
          } else {
            same = (bits2 >> cell) & 1;
            prob *= same ? p_same : 1.0 - p_same;
          }
          sample.eps[1][j][k] = (same ? sign1 : -sign1) * model.magnitude;
        }
      }
      if (prob == 0.0) continue;
      patterns.emplace_back(prob, sample);
    }
  }
  return patterns;
}

WelfareEstimate expected_refined_welfare(const ZeroSumSpec& spec,
                                         const PerturbationModel& model, std::size_t n,
                                         const RngStream& stream, WelfareMethod method) {
  spec.validate();
  model.validate();
  WelfareEstimate out;
  if (method == WelfareMethod::exhaustive) {
    const auto patterns = enumerate_two_point_patterns(model);
    double mean = 0.0;
    double p_agree = 0.0;
    double p_e1 = 0.0;
    for (const auto& [prob, sample] : patterns) {
      const BimatrixGame refined = refine_game(spec, sample);
      mean += prob * welfare_optimal_equilibrium(refined).welfare;
      const AgreementEvent event = classify_agreement(spec, sample);
      if (event != AgreementEvent::none) p_agree += prob;
      if (event == AgreementEvent::e1) p_e1 += prob;
    }
    out.mean = mean;
    out.std_error = 0.0;
    out.p_full_agreement = p_agree;
    out.p_e1 = p_e1;
    out.n = patterns.size();
    return out;
  }

  require(n >= 1, Errc::bad_argument, "need n >= 1 samples");
  std::vector<double> welfare;
  std::vector<double> agree(n);
  std::vector<double> e1(n);
  parallel_fill(n, welfare, [&](std::size_t i) {
    const PerturbationSample sample = sample_perturbation(model, stream.sub(i));
    const BimatrixGame refined = refine_game(spec, sample);
    const AgreementEvent event = classify_agreement(spec, sample);
    agree[i] = event != AgreementEvent::none ? 1.0 : 0.0;
    e1[i] = event == AgreementEvent::e1 ? 1.0 : 0.0;
    return welfare_optimal_equilibrium(refined).welfare;
  });
  const MeanStdError stats = mean_std_error(welfare);
  out.mean = stats.mean;
  out.std_error = stats.std_error;
  out.p_full_agreement = pairwise_sum(agree) / static_cast<double>(n);
  out.p_e1 = pairwise_sum(e1) / static_cast<double>(n);
  out.n = n;
  return out;
}

std::string game_to_json(const BimatrixGame& game) {
  auto matrix_json = [](const Matrix& m) {
    std::ostringstream out;
    out << "[";
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r) out << ",";
      out << "[";
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (c) out << ",";
        out << format_double(m.at(r, c));
      }
      out << "]";
    }
    out << "]";
    return out.str();
  };
  std::ostringstream out;
  out << "{\"payoff1\":" << matrix_json(game.payoff1)
      << ",\"payoff2\":" << matrix_json(game.payoff2) << "}";
  return out.str();
}

}  // namespace refinery
