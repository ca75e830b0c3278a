#include <doctest.h>

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fillgap/eigenstructure.hpp"
#include "fillgap/errors.hpp"
#include "fillgap/rng.hpp"
#include "fillgap/spectral.hpp"

using namespace fillgap;

namespace {

// n = 4 with neutral labels {2, 3} and p_{1,4} = 0.8.
ParamVector neutral23_n4(double p14 = 0.8) {
  return ParamVector::from_function(4, [&](int i, int j) { return (i == 1 && j == 4) ? p14 : 0.5; });
}

}  // namespace

TEST_CASE("h profile and a0") {
  const auto h2 = h_profile(2);
  CHECK(h2[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(h2[1] == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(a0(2) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  for (int n = 2; n <= 10; ++n) {
    const auto h = h_profile(n);
    CHECK(std::abs(std::accumulate(h.begin(), h.end(), 0.0)) <= 1e-14);
    for (int r = 1; r < n; ++r) CHECK(h[static_cast<std::size_t>(r - 1)] > h[static_cast<std::size_t>(r)]);
    CHECK(a0(n) > 0.0);
  }
  CHECK_THROWS_AS(h_profile(1), ArgumentError);
}

TEST_CASE("f_c on uniform n = 4, c = 2") {
  const ChainOperator op(ParamVector::uniform(4));
  const auto e = wilson_f(op, 2);
  CHECK(e.residual <= 1e-12);
  const auto u = extract_U(op, e);
  const double a = a0(4);
  CHECK(std::abs(u.D[0] + a) <= 1e-12);
  CHECK(std::abs(u.D[1] - a) <= 1e-12);
  CHECK(std::abs(u.D[2]) <= 1e-12);
}

TEST_CASE("f_1 on uniform input has D = a0 e_1") {
  const ChainOperator op(ParamVector::uniform(5));
  const auto u = extract_U(op, wilson_f(op, 1));
  CHECK(std::abs(u.D[0] - a0(5)) <= 1e-12);
  for (std::size_t r = 1; r < u.D.size(); ++r) CHECK(std::abs(u.D[r]) <= 1e-12);
}

TEST_CASE("f_c is an eigenfunction for every neutral c") {
  for (int n = 3; n <= 6; ++n) {
    for (int A = 2; A <= n - 1; ++A) {
      for (int B = A; B <= n - 1; ++B) {
        const ChainOperator op(gen_neutral_interval(n, A, B, 3));
        for (int c = A; c <= B; ++c) {
          const auto e = wilson_f(op, c);
          REQUIRE(e.residual <= 1e-12);
          const auto u = extract_U(op, e);
          for (int r = 1; r < n; ++r) {
            const double want = a0(n) * ((r == c ? 1.0 : 0.0) - (r == c - 1 ? 1.0 : 0.0));
            REQUIRE(std::abs(u.D[static_cast<std::size_t>(r - 1)] - want) <= 1e-12);
          }
          REQUIRE(std::abs(std::accumulate(u.D.begin(), u.D.end(), 0.0)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("f_c requires a neutral label") {
  const auto pv = gen_neutral_interval(5, 2, 4, 1);
  CHECK_THROWS_AS(wilson_f(pv, 1), PreconditionError);
  CHECK_THROWS_AS(wilson_f(pv, 5), PreconditionError);
  CHECK_THROWS_AS(wilson_f(pv, 6), RangeError);
  CHECK(wilson_f(gen_neutral_interval(5, 2, 4, 1), 3).residual <= 1e-12);
}

TEST_CASE("psi at n = 4 with neutral labels {2, 3}") {
  const ChainOperator op(neutral23_n4());
  const auto e = psi(op);
  CHECK(e.residual <= 1e-12);
  const auto u = extract_U(op, e);
  const double a = a0(4);
  CHECK(std::abs(u.D[0] - a) <= 1e-12);
  CHECK(std::abs(u.D[1]) <= 1e-12);
  CHECK(std::abs(u.D[2] - 4.0 * a) <= 1e-12);
  const double sum = std::accumulate(u.D.begin(), u.D.end(), 0.0);
  CHECK(std::abs(sum - a * (1.0 + 4.0)) <= 1e-12);
}

TEST_CASE("psi across neutral intervals [2, n-1]") {
  for (int n = 3; n <= 6; ++n) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto pv = gen_neutral_interval(n, 2, n - 1, seed);
      const ChainOperator op(pv);
      const auto e = psi(op);
      REQUIRE(e.residual <= 1e-12);
      const auto u = extract_U(op, e);
      const double rho = pv(1, n) / pv(n, 1);
      REQUIRE(std::abs(u.D.front() - a0(n)) <= 1e-12);
      REQUIRE(std::abs(u.D.back() - rho * a0(n)) <= 1e-12);
      for (int r = 2; r <= n - 2; ++r) REQUIRE(std::abs(u.D[static_cast<std::size_t>(r - 1)]) <= 1e-12);
    }
  }
}

TEST_CASE("psi requires the neutral interval [2, n-1]") {
  CHECK_THROWS_AS(psi(ParamVector::uniform(4)), PreconditionError);
  CHECK_THROWS_AS(psi(gen_neutral_interval(5, 2, 3, 1)), PreconditionError);
  CHECK_THROWS_AS(psi(gen_no_neutral(4, 1)), PreconditionError);
}

TEST_CASE("extract_U follows the swap rule and rejects non-eigenvectors") {
  const ChainOperator op(gen_neutral_interval(5, 2, 4, 2));
  const auto u = extract_U(op, wilson_f(op, 3));
  CHECK(u.welldef_residual <= 1e-12);
  CHECK(u.swap_residual <= 1e-12);
  CHECK(u.U.size() == 10);

  // The constant vector sits at L-eigenvalue 0.
  const auto c = make_eigdata(op, Vec(op.size(), 1.0), 0.0);
  CHECK_THROWS_AS(extract_U(op, c), StructureError);

  // A random vector labelled as lambda_* is not a function of the first two labels.
  Rng rng(1);
  Vec g(op.size());
  for (auto& v : g) v = rng.uniform(-1, 1);
  auto fake = make_eigdata(op, g, lambda_star(5));
  CHECK(fake.residual > 1e-3);
  CHECK_THROWS_AS(extract_U(op, fake), StructureError);
}

TEST_CASE("random vectors in the uniform n = 4 eigenspace") {
  const ChainOperator op(ParamVector::uniform(4));
  const auto basis = lambda_star_eigenbasis(op);
  REQUIRE(basis.size() == 3);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    Vec g(op.size(), 0.0);
    for (const auto& b : basis) {
      const double w = rng.uniform(-1, 1);
      for (std::size_t x = 0; x < g.size(); ++x) g[x] += w * b.g[x];
    }
    const auto e = make_eigdata(op, g, lambda_star(4));
    CHECK(e.residual <= 1e-10);
    const auto u = extract_U(op, e);
    CHECK(u.welldef_residual <= 1e-11);
    CHECK(check_orbital_relation(op.params(), u).empty());
  }
}

TEST_CASE("orbital relation holds on eigenbasis vectors") {
  for (const auto& pv : {ParamVector::uniform(5), gen_neutral_interval(5, 2, 4, 1), gen_neutral_interval(5, 3, 4, 2)}) {
    const ChainOperator op(pv);
    for (const auto& e : lambda_star_eigenbasis(op)) {
      const auto u = extract_U(op, e);
      CHECK(check_orbital_relation(pv, u).empty());
    }
  }
}

TEST_CASE("orbital relation flags a corrupted table") {
  const auto pv = gen_neutral_interval(5, 2, 4, 1);
  const ChainOperator op(pv);
  auto u = extract_U(op, wilson_f(op, 3));
  REQUIRE(check_orbital_relation(pv, u).empty());
  u.U[{2, 4}] += 0.1;
  CHECK_FALSE(check_orbital_relation(pv, u).empty());
}

TEST_CASE("support boundary") {
  const ChainOperator op(ParamVector::uniform(4));
  const auto u = extract_U(op, wilson_f(op, 2));
  const auto r = check_support_boundary(u);
  CHECK(r.has_first_row);
  CHECK(r.has_last_column);
  CHECK(r.passed());

  const ChainOperator pop(neutral23_n4());
  CHECK(check_support_boundary(extract_U(pop, psi(pop))).passed());

  UTable empty;
  empty.n = 4;
  CHECK_THROWS_AS(check_support_boundary(empty), ArgumentError);
}

TEST_CASE("U of f_2 on uniform n = 4 from partial sums") {
  // Non-crossing everywhere: U_{i,j} = sum_{r=i}^{j-1} D_r.
  const ChainOperator op(ParamVector::uniform(4));
  const auto u = extract_U(op, wilson_f(op, 2));
  const double a = a0(4);
  CHECK(std::abs(u.at(1, 2) + a) <= 1e-12);
  CHECK(std::abs(u.at(1, 3)) <= 1e-12);
  CHECK(std::abs(u.at(1, 4)) <= 1e-12);
  CHECK(std::abs(u.at(2, 3) - a) <= 1e-12);
  CHECK(std::abs(u.at(2, 4) - a) <= 1e-12);
  CHECK(u.support.count({1, 2}) == 1);
  CHECK(u.support.count({2, 4}) == 1);
}

TEST_CASE("predicted_U_from_D reproduces extracted tables") {
  const auto pv = neutral23_n4();
  const ChainOperator op(pv);
  const auto neutral = neutral_labels(pv);
  const auto u = extract_U(op, wilson_f(op, 2));
  CHECK(max_table_difference(predicted_U_from_D(pv, u.D, neutral), u) <= 1e-11);

  for (const auto& q : {gen_neutral_interval(6, 3, 4, 9), gen_neutral_interval(6, 2, 5, 4), ParamVector::uniform(5)}) {
    const ChainOperator qop(q);
    for (const auto& e : lambda_star_eigenbasis(qop)) {
      const auto ue = extract_U(qop, e);
      REQUIRE(max_table_difference(predicted_U_from_D(q, ue.D, neutral_labels(q)), ue) <= 1e-10);
    }
  }
}

TEST_CASE("predicted_U_from_D edge cases") {
  const auto pv = gen_neutral_interval(5, 2, 3, 1);
  const auto neutral = neutral_labels(pv);
  const auto zero = predicted_U_from_D(pv, std::vector<double>(4, 0.0), neutral);
  for (const auto& [key, v] : zero.U) CHECK(v == 0.0);

  // D supported on [A-1, B] = [1, 3] with zero sum: the crossing pair (1, 5) vanishes.
  const auto z = predicted_U_from_D(pv, {1.0, -3.0, 2.0, 7.0}, neutral);
  CHECK(z.at(1, 5) == 0.0);
  CHECK(z.D[3] == 0.0);  // r = 4 > B is cut
  CHECK(z.at(1, 4) == doctest::Approx(2.0 * pv(4, 1) * 0.0));
  CHECK(z.at(1, 2) == 1.0);

  CHECK_THROWS_AS(predicted_U_from_D(gen_no_neutral(5, 1), std::vector<double>(4, 0.0), neutral_labels(gen_no_neutral(5, 1))),
                  PreconditionError);
  CHECK_THROWS_AS(predicted_U_from_D(pv, std::vector<double>(3, 0.0), neutral), ArgumentError);
}

TEST_CASE("equality-case checks pass on eigenbasis vectors") {
  for (const auto& pv : {ParamVector::uniform(4), gen_neutral_interval(5, 2, 4, 6), gen_neutral_interval(6, 3, 3, 2)}) {
    const ChainOperator op(pv);
    for (const auto& e : lambda_star_eigenbasis(op)) {
      const auto rep = eqcase_checks(op, e);
      CHECK(rep.passed());
      CHECK(rep.commute_max <= 1e-13);
      CHECK(rep.sine_similarity >= 1 - 1e-10);
      CHECK(rep.orbits_checked > 0);
    }
  }
}

TEST_CASE("equality-case checks pass on f_c") {
  const ChainOperator op(gen_neutral_interval(6, 2, 4, 8));
  for (int c = 2; c <= 4; ++c) CHECK(eqcase_checks(op, wilson_f(op, c)).passed());
}

TEST_CASE("sine profile check fails away from lambda_*") {
  const ChainOperator op(ParamVector::uniform(5));
  const auto pairs = dense_top_eigenpairs(op, 12);
  // The first cluster after lambda_* belongs to a different eigenvalue.
  const double target = 1.0 - lambda_star(5);
  for (std::size_t t = 0; t < pairs.values.size(); ++t) {
    if (std::abs(pairs.values[t] - target) < 1e-6 || std::abs(pairs.values[t] - 1.0) < 1e-6) continue;
    const auto e = make_eigdata(op, pairs.vectors[t], 1.0 - pairs.values[t]);
    const auto rep = eqcase_checks(op, e);
    CHECK(rep.sine_similarity < 1 - 1e-10);
    CHECK_FALSE(rep.passed());
    break;
  }
}

TEST_CASE("D-map rank equals the eigenspace dimension") {
  {
    const ChainOperator op(gen_neutral_interval(5, 3, 4, 1));
    const auto basis = lambda_star_eigenbasis(op);
    CHECK(basis.size() == 2);
    CHECK(dmap_rank(op, basis) == 2);
  }
  {
    const ChainOperator op(neutral23_n4());
    const auto basis = lambda_star_eigenbasis(op);
    CHECK(basis.size() == 3);
    CHECK(dmap_rank(op, basis) == 3);
  }
  {
    const ChainOperator op(gen_neutral_interval(5, 3, 4, 1));
    CHECK(dmap_rank(op, {wilson_f(op, 3)}) == 1);
  }
}

TEST_CASE("UTable JSON") {
  const ChainOperator op(ParamVector::uniform(3));
  const auto u = extract_U(op, wilson_f(op, 2));
  const auto j = nlohmann::json::parse(to_json(u));
  CHECK(j["U"].size() == 3);
  CHECK(j["D"].size() == 2);
  CHECK(j["U"][0].contains("a"));
  CHECK(j["support"].is_array());
  CHECK(nlohmann::json::parse(to_json(std::vector<OrbitalViolation>{})).empty());
}
