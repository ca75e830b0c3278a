#include <doctest.h>

#include <json.hpp>

#include "fillgap/errors.hpp"
#include "fillgap/spectral.hpp"
#include "fillgap/verify.hpp"

using namespace fillgap;

TEST_CASE("predicted multiplicity") {
  CHECK(predicted_multiplicity(5, 5) == 4);
  CHECK(predicted_multiplicity(5, 3) == 4);
  CHECK(predicted_multiplicity(5, 2) == 2);
  CHECK(predicted_multiplicity(5, 1) == 1);
  CHECK(predicted_multiplicity(3, 1) == 2);
}

TEST_CASE("uniform n = 5") {
  const auto row = verify_instance(ParamVector::uniform(5));
  CHECK(row.N == 5);
  CHECK(row.M_computed == 4);
  CHECK(row.gap_matches);
  CHECK(std::abs(row.gap - lambda_star(5)) <= 1e-10);
  CHECK(row.pass);
}

TEST_CASE("n = 4 with neutral labels {2, 3}") {
  const auto pv = ParamVector::from_function(4, [](int i, int j) { return (i == 1 && j == 4) ? 0.8 : 0.5; });
  const auto row = verify_instance(pv);
  CHECK(row.N == 2);
  CHECK(row.M_computed == 3);
  CHECK(row.M_predicted == 3);
  CHECK(row.pass);
}

TEST_CASE("n = 3, single neutral label") {
  const auto pv = ParamVector::from_upper(3, {0.5, 0.7, 0.5});
  const auto row = verify_instance(pv);
  CHECK(row.N == 1);
  CHECK(*row.A == 2);
  CHECK(*row.B == 2);
  CHECK(row.M_computed == 2);
  CHECK(row.pass);
  // Independent look at the 6x6 spectrum: the cluster sits at 1 - 1/4.
  const auto rep = spectrum_dense(pv);
  CHECK(count_near(rep.eigenvalues, 0.75, 1e-9) == 2);
}

TEST_CASE("no neutral label gives a strictly larger gap") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto row = verify_instance(gen_no_neutral(5, seed));
    CHECK(row.N == 0);
    CHECK_FALSE(row.gap_matches);
    CHECK(row.margin > kDefaultTolGap);
    CHECK(row.pass);
  }
}

TEST_CASE("verify_instance preconditions") {
  CHECK_THROWS_AS(verify_instance(ParamVector::from_upper(3, {0.4, 0.5, 0.5})), PreconditionError);
  CHECK_THROWS_AS(verify_instance(ParamVector::uniform(2)), ArgumentError);
}

TEST_CASE("sweep over all families passes") {
  SweepConfig cfg;
  cfg.ns = {3, 4, 5};
  cfg.families = {"uniform", "neutral_interval", "regular_random", "no_neutral"};
  cfg.seeds = 20;
  const auto res = verify_sweep(cfg);
  // uniform: 3; neutral_interval: 20 * (1 + 3 + 6); others 20 each per n.
  CHECK(res.rows.size() == 3 + 20 * 10 + 2 * 60);
  CHECK(res.all_passed());
  for (const auto& r : res.rows) CHECK_MESSAGE(r.pass, to_json(r));
}

TEST_CASE("sweep edge cases") {
  SweepConfig empty;
  empty.ns = {3, 4};
  CHECK(verify_sweep(empty).rows.empty());

  SweepConfig two;
  two.ns = {2};
  two.families = {"uniform"};
  try {
    verify_sweep(two);
    FAIL("n = 2 must be rejected");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("n must be >= 3") != std::string::npos);
  }

  SweepConfig bad;
  bad.ns = {3};
  bad.families = {"mystery"};
  CHECK_THROWS_AS(verify_sweep(bad), ArgumentError);
}

TEST_CASE("non-regular instance becomes a failing row") {
  SweepConfig cfg;
  cfg.instances.push_back({"custom", ParamVector::from_upper(3, {0.4, 0.5, 0.5})});
  const auto res = verify_sweep(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK_FALSE(res.rows[0].pass);
  CHECK(res.rows[0].error.find("not regular") != std::string::npos);
  CHECK_FALSE(res.all_passed());
}

TEST_CASE("sweeps are deterministic and thread count does not change rows") {
  SweepConfig cfg;
  cfg.ns = {4, 5};
  cfg.families = {"regular_random", "no_neutral"};
  cfg.seeds = 4;
  cfg.base_seed = 7;
  const auto a = verify_sweep(cfg);
  cfg.threads = 3;
  const auto b = verify_sweep(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(to_json(a.rows[i]) == to_json(b.rows[i]));
}

TEST_CASE("sweep config JSON") {
  const auto cfg = sweep_config_from_json(R"({"ns":[3,4],"families":["uniform"],"seeds":2,"base_seed":9,
    "tol_gap":1e-9,"instances":[{"family":"hand","params":{"n":3,"p":[{"i":1,"j":2,"v":0.5},{"i":1,"j":3,"v":0.7},{"i":2,"j":3,"v":0.5}]}}]})");
  CHECK(cfg.ns == std::vector<int>{3, 4});
  CHECK(cfg.seeds == 2);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.tol_gap == 1e-9);
  REQUIRE(cfg.instances.size() == 1);
  CHECK(cfg.instances[0].family == "hand");
  CHECK_THROWS_AS(sweep_config_from_json(R"({"nz":[3]})"), ArgumentError);
  CHECK_THROWS_AS(sweep_config_from_json("[1,2]"), ArgumentError);
  CHECK_THROWS_AS(sweep_config_from_json(R"({"ns":"three"})"), ArgumentError);
}

TEST_CASE("row serialization") {
  const auto row = verify_instance(ParamVector::uniform(3));
  const auto j = nlohmann::json::parse(to_json(row));
  CHECK(j["N"] == 3);
  CHECK(j["M_computed"] == 2);
  CHECK_FALSE(j.contains("runtime_ms"));
  CHECK(nlohmann::json::parse(to_json(row, true)).contains("runtime_ms"));
  const auto header = csv_header();
  const auto line = to_csv(row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(line.begin(), line.end(), ','));
}
