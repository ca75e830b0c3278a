#include "fillgap/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fillgap/errors.hpp"

namespace fillgap {

Permutation step(const ParamVector& pv, const Permutation& x, Rng& rng) {
  const int n = x.size();
  if (pv.n() != n) throw ArgumentError("state and parameter vector sizes differ");
  const int r = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
  if (rng.uniform() < pv(x.at(r), x.at(r + 1))) return x;
  return apply_tau(x, r);
}

ChainRun run_chain(const ParamVector& pv, const Permutation& start, std::uint64_t steps, std::uint64_t burnin,
                   std::uint64_t seed, bool track_swaps) {
  const int n = pv.n();
  if (start.size() != n) throw ArgumentError("start state has the wrong size");
  if (n > kMaxSamplerTvN) throw CapacityError("visit counts are limited to n <= " + std::to_string(kMaxSamplerTvN));
  const auto st = StateSpace::get(n);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> stay(nn * nn, 0.0);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (a != b) stay[static_cast<std::size_t>(a - 1) * nn + static_cast<std::size_t>(b - 1)] = pv(a, b);

  ChainRun run;
  run.n = n;
  run.start = start;
  run.steps = steps;
  run.burnin = burnin;
  run.seed = seed;
  run.algorithm = std::string(Rng::kAlgorithm);
  run.visits.assign(st->size(), 0);
  if (track_swaps) run.swaps.assign(st->size() * (nn - 1), 0);

  // Same draws as step(): r first, then the stay coin.
  Rng rng(seed);
  auto x = static_cast<std::size_t>(rank(start));
  auto advance = [&](bool record) {
    const int r = 1 + static_cast<int>(rng.below(nn - 1));
    const double u = rng.uniform();
    if (u < stay[st->pair_code(r)[x]]) return;
    if (record && track_swaps) ++run.swaps[x * (nn - 1) + static_cast<std::size_t>(r - 1)];
    x = st->neighbor(r)[x];
  };
  for (std::uint64_t t = 0; t < burnin; ++t) advance(false);
  for (std::uint64_t t = 0; t < steps; ++t) {
    advance(true);
    ++run.visits[x];
  }
  run.last = unrank(x, n);
  return run;
}

TvResult run_tv(const ParamVector& pv, std::uint64_t steps, std::uint64_t burnin, std::uint64_t seed,
                std::optional<Permutation> start) {
  const int n = pv.n();
  if (n > kMaxSamplerTvN) throw CapacityError("TV estimate is limited to n <= " + std::to_string(kMaxSamplerTvN));
  TvResult out;
  out.run = run_chain(pv, start.value_or(Permutation::identity(n)), steps, burnin, seed);
  const auto mu = stationary(pv).mu;
  double tv = 0.0;
  if (steps == 0) {
    const auto at = static_cast<std::size_t>(rank(out.run.last));
    for (std::size_t x = 0; x < mu.size(); ++x) tv += std::abs((x == at ? 1.0 : 0.0) - mu[x]);
  } else {
    const auto total = static_cast<double>(steps);
    for (std::size_t x = 0; x < mu.size(); ++x) tv += std::abs(static_cast<double>(out.run.visits[x]) / total - mu[x]);
  }
  out.tv = 0.5 * tv;
  return out;
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw ArgumentError("empty distribution");
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

std::string to_json(const TvResult& r, bool with_visits) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.run.algorithm;
  j["seed"] = r.run.seed;
  j["n"] = r.run.n;
  j["start"] = std::vector<int>(r.run.start.entries().begin(), r.run.start.entries().end());
  j["steps"] = r.run.steps;
  j["burnin"] = r.run.burnin;
  j["tv"] = r.tv;
  if (with_visits) j["visits"] = r.run.visits;
  return j.dump();
}

}  // namespace fillgap
