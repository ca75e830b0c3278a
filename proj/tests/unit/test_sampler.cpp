#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "fillgap/errors.hpp"
#include "fillgap/sampler.hpp"

using namespace fillgap;

TEST_CASE("one step on uniform input") {
  const auto pv = ParamVector::uniform(4);
  const auto x = Permutation::identity(4);
  Rng rng(1);
  const int draws = 600000;
  std::map<Permutation, int> hits;
  for (int t = 0; t < draws; ++t) ++hits[step(pv, x, rng)];
  CHECK(hits.size() == 4);
  const double stay = hits[x] / static_cast<double>(draws);
  CHECK(std::abs(stay - 0.5) <= 3 * std::sqrt(0.25 / draws));
  for (int r = 1; r <= 3; ++r) {
    const double p = hits[apply_tau(x, r)] / static_cast<double>(draws);
    const double want = 1.0 / 6.0;
    CHECK(std::abs(p - want) <= 3 * std::sqrt(want * (1 - want) / draws));
  }
}

TEST_CASE("one-step frequencies match the row of K") {
  const auto pv = gen_no_neutral(4, 2);
  const ChainOperator op(pv);
  const auto x = unrank(13, 4);
  Rng rng(2);
  const int draws = 1000000;
  std::vector<int> hits(op.size(), 0);
  for (int t = 0; t < draws; ++t) ++hits[rank(step(pv, x, rng))];
  for (std::size_t y = 0; y < op.size(); ++y) {
    Vec ind(op.size(), 0.0);
    ind[y] = 1.0;
    const double kxy = op.apply_K(ind)[13];
    const double freq = hits[y] / static_cast<double>(draws);
    CHECK(std::abs(freq - kxy) <= 3 * std::sqrt(kxy * (1 - kxy) / draws) + 1e-12);
  }
}

TEST_CASE("extreme stay probability") {
  const auto pv = ParamVector::from_function(3, [](int, int) { return 0.99; });
  const auto x = Permutation::identity(3);
  Rng rng(3);
  const int draws = 1000000;
  int swaps_r1 = 0;
  for (int t = 0; t < draws; ++t) swaps_r1 += step(pv, x, rng) == apply_tau(x, 1);
  const double want = 0.01 / 2;
  CHECK(std::abs(swaps_r1 / static_cast<double>(draws) - want) <= 3 * std::sqrt(want * (1 - want) / draws));
}

TEST_CASE("chi-square smoke test of the kernel at n = 3") {
  const auto pv = ParamVector::from_upper(3, {0.5, 0.7, 0.5});
  const ChainOperator op(pv);
  const auto x = Permutation::identity(3);
  Rng rng(4);
  const int draws = 1000000;
  std::vector<int> hits(6, 0);
  for (int t = 0; t < draws; ++t) ++hits[rank(step(pv, x, rng))];
  double chi2 = 0.0;
  int cells = 0;
  for (std::size_t y = 0; y < 6; ++y) {
    Vec ind(6, 0.0);
    ind[y] = 1.0;
    const double expected = op.apply_K(ind)[0] * draws;
    if (expected == 0.0) {
      REQUIRE(hits[y] == 0);
      continue;
    }
    chi2 += (hits[y] - expected) * (hits[y] - expected) / expected;
    ++cells;
  }
  REQUIRE(cells == 3);
  // Two degrees of freedom: the tail probability is exp(-chi2 / 2).
  CHECK(std::exp(-chi2 / 2) > 0.001);
}

TEST_CASE("visit counts and TV on uniform n = 4") {
  const auto res = run_tv(ParamVector::uniform(4), 1000000, 1000, 5);
  CHECK(std::accumulate(res.run.visits.begin(), res.run.visits.end(), std::uint64_t{0}) == 1000000);
  CHECK(res.tv <= 0.02);
  CHECK(res.run.algorithm == std::string(Rng::kAlgorithm));
}

TEST_CASE("TV with zero steps is the distance from a point mass") {
  const auto pv = gen_regular_random(4, 1);
  const auto mu = stationary(pv).mu;
  const auto res = run_tv(pv, 0, 0, 1);
  CHECK(res.tv == doctest::Approx(1.0 - mu[0]).epsilon(1e-14));
}

TEST_CASE("runs are reproducible from the seed") {
  const auto pv = gen_no_neutral(5, 3);
  const auto a = run_tv(pv, 50000, 100, 9);
  const auto b = run_tv(pv, 50000, 100, 9);
  const auto c = run_tv(pv, 50000, 100, 10);
  CHECK(a.run.visits == b.run.visits);
  CHECK(to_json(a, true) == to_json(b, true));
  CHECK(a.run.visits != c.run.visits);
}

TEST_CASE("sampler is capped at n = 6") {
  CHECK_THROWS_AS(run_tv(ParamVector::uniform(7), 10, 0, 1), CapacityError);
}

TEST_CASE("flows balance in both directions") {
  const auto pv = gen_no_neutral(3, 4);
  const auto run = run_chain(pv, Permutation::identity(3), 2000000, 1000, 11, true);
  const auto st = StateSpace::get(3);
  for (std::size_t x = 0; x < 6; ++x) {
    for (int r = 1; r <= 2; ++r) {
      const std::size_t y = st->neighbor(r)[x];
      if (y < x) continue;
      const double fxy = static_cast<double>(run.swaps[x * 2 + static_cast<std::size_t>(r - 1)]);
      const double fyx = static_cast<double>(run.swaps[y * 2 + static_cast<std::size_t>(r - 1)]);
      // Difference of two nearly independent counts: sd about sqrt(fxy + fyx).
      CHECK(std::abs(fxy - fyx) <= 3 * std::sqrt(fxy + fyx) + 1);
    }
  }
}

TEST_CASE("starting from mu, one step stays at mu") {
  const auto pv = gen_regular_random(4, 6);
  const auto mu = stationary(pv).mu;
  Rng rng(12);
  const int draws = 1000000;
  std::vector<int> hits(mu.size(), 0);
  for (int t = 0; t < draws; ++t) {
    const auto x = unrank(sample_index(mu, rng), 4);
    ++hits[rank(step(pv, x, rng))];
  }
  for (std::size_t y = 0; y < mu.size(); ++y) {
    const double f = hits[y] / static_cast<double>(draws);
    CHECK(std::abs(f - mu[y]) <= 4 * std::sqrt(mu[y] * (1 - mu[y]) / draws));
  }
}
