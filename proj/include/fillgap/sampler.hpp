#pragma once

// Seeded simulation of the chain: pick r uniformly in 1..n-1, stay with
// probability p_{x_r,x_{r+1}}, otherwise swap positions r and r+1.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fillgap/chain.hpp"
#include "fillgap/params.hpp"
#include "fillgap/permutation.hpp"
#include "fillgap/rng.hpp"

namespace fillgap {

inline constexpr int kMaxSamplerTvN = 6;

Permutation step(const ParamVector& pv, const Permutation& x, Rng& rng);

struct ChainRun {
  int n = 0;
  Permutation start = Permutation::identity(2);
  std::uint64_t steps = 0;
  std::uint64_t burnin = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  // visits[rank] over the recorded states; sums to steps.
  std::vector<std::uint64_t> visits;
  // swaps[rank * (n-1) + (r-1)]: moves from that state to its tau_r neighbour (optional).
  std::vector<std::uint64_t> swaps;
  Permutation last = Permutation::identity(2);
};

// Records X_{burnin+1}, ..., X_{burnin+steps}. Visit counts need n <= kMaxSamplerTvN.
ChainRun run_chain(const ParamVector& pv, const Permutation& start, std::uint64_t steps, std::uint64_t burnin,
                   std::uint64_t seed, bool track_swaps = false);

struct TvResult {
  double tv = 0.0;
  ChainRun run;
};

// Total variation between the empirical distribution of the recorded states
// and mu. With steps = 0 the empirical law is the point mass at the state
// reached after burn-in. CapacityError for n > kMaxSamplerTvN.
TvResult run_tv(const ParamVector& pv, std::uint64_t steps, std::uint64_t burnin, std::uint64_t seed,
                std::optional<Permutation> start = std::nullopt);

// Inverse-CDF draw of a state rank from a probability vector.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

std::string to_json(const TvResult& r, bool with_visits = false);

}  // namespace fillgap
