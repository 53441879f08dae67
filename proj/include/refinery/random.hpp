#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace refinery {

// Seeded random stream with cheap deterministic sub-streams.
//
// Sub-stream derivation is the reproducibility contract used throughout:
// sample i of any Monte Carlo loop draws from stream.sub(i), so results do
// not depend on evaluation order or worker count. The generator is
// xoshiro256++ seeded through splitmix64; every draw is fully specified by
// (seed, sub-stream path, draw index).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Derived stream for sample `index`; independent of draws made so far.
  RngStream sub(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01();
  // Uniform on (0,1]; never returns 0 (safe for log).
  double uniform01_open();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();
  bool bernoulli(double p);
  // Index draw from a probability vector (cumulative scan).
  std::size_t categorical(std::span<const double> probs);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Pairwise (fixed reduction tree) summation; deterministic for a given
// vector regardless of how the vector was produced.
double pairwise_sum(std::span<const double> values);

struct MeanStdError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of the mean (sample variance with n-1).
MeanStdError mean_std_error(std::span<const double> values);

}  // namespace refinery
