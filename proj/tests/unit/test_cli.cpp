#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "fillgap/eigenstructure.hpp"
#include "fillgap/spectral.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(FILLGAP_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(FILLGAP_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("spectrum --uniform 4") {
  const auto r = run("spectrum --uniform 4");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["gap"].get<double>() - fillgap::lambda_star(4)) <= 1e-10);
  CHECK(j["multiplicity_at_target"] == 3);
  CHECK(j["N"] == 4);
  CHECK(j["verdict"] == "pass");
}

TEST_CASE("spectrum rejects a malformed params file") {
  CHECK(run("spectrum --params " + data("bad.json")).code == 2);
  CHECK(run("spectrum --params " + data("does_not_exist.json")).code == 2);
  CHECK(run("spectrum").code == 2);
  CHECK(run("spectrum --uniform 4 --bogus").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("spectrum CSV rows") {
  const auto r = run("spectrum --params " + data("neutral23_n4.json") + " --format csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("index,eigenvalue\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 25);
}

TEST_CASE("spectrum JSON round-trips the report fields") {
  const auto r = run("spectrum --params " + data("neutral23_n4.json"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"n", "eigenvalues", "gap", "lambda_star", "multiplicity_at_target", "cluster_tol", "method",
                          "clusters", "converged", "N", "M_predicted", "verdict"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["multiplicity_at_target"] == 3);
  CHECK(j["M_predicted"] == 3);
}

TEST_CASE("spectrum table output") {
  const auto r = run("spectrum --uniform 3 --format table");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("verdict") != std::string::npos);
}

TEST_CASE("verify with a sweep file") {
  const auto r = run("verify --sweep " + data("sweep_small.json"));
  CHECK(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["pass"] == true);
    ++rows;
  }
  // 2 uniform + 3 * (1 + 3) neutral intervals + 2 * 3 * 2 others
  CHECK(rows == 2 + 12 + 12);
}

TEST_CASE("verify default sweep passes") { CHECK(run("verify --format csv").code == 0); }

TEST_CASE("verify flags an injected non-regular instance") {
  const auto r = run("verify --sweep " + data("sweep_nonregular.json"));
  CHECK(r.code == 1);
  CHECK(r.out.find("not regular") != std::string::npos);
}

TEST_CASE("verify rejects n = 2") { CHECK(run("verify --sweep " + data("sweep_n2.json")).code == 2); }

TEST_CASE("verify output is byte-identical for the same seed") {
  const auto a = run("verify --sweep " + data("sweep_small.json") + " --seed 7");
  const auto b = run("verify --sweep " + data("sweep_small.json") + " --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("eigfun f_c on uniform n = 4") {
  const auto r = run("eigfun --uniform 4 --which f_c --c 2");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["residual"].get<double>() <= 1e-12);
  const double a = fillgap::a0(4);
  const auto d = j["D"].get<std::vector<double>>();
  CHECK(std::abs(d[0] + a) <= 1e-12);
  CHECK(std::abs(d[1] - a) <= 1e-12);
  CHECK(std::abs(d[2]) <= 1e-12);
}

TEST_CASE("eigfun psi") {
  const auto r = run("eigfun --params " + data("neutral23_n4.json") + " --which psi");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double a = fillgap::a0(4);
  const auto d = j["D"].get<std::vector<double>>();
  CHECK(std::abs(d[0] - a) <= 1e-12);
  CHECK(std::abs(d[1]) <= 1e-12);
  CHECK(std::abs(d[2] - 4 * a) <= 1e-12);
  CHECK(j["independent_of_f"] == true);
}

TEST_CASE("eigfun precondition failures exit 2") {
  CHECK(run("eigfun --uniform 4 --which psi").code == 2);
  CHECK(run("eigfun --params " + data("neutral23_n4.json") + " --which f_c --c 1").code == 2);
}

TEST_CASE("orbits on a uniform triple") {
  const auto r = run("orbits --uniform 4 --triple 1 2 3");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto ev = j["eigenvalues"].get<std::vector<double>>();
  const std::vector<double> want{0, 0.5, 0.5, 1.5, 1.5, 2};
  for (std::size_t t = 0; t < 6; ++t) CHECK(std::abs(ev[t] - want[t]) <= 1e-12);
}

TEST_CASE("orbits --exact with rational parameters") {
  const auto r = run("orbits --params " + data("rational_n3.json") + " --triple 1 2 3 --exact");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["charpoly_identity"] == true);
  CHECK(j["s_exact"] == "9/50");
}

TEST_CASE("orbits rejects a bad triple") {
  CHECK(run("orbits --uniform 4 --triple 3 2 1").code == 2);
  CHECK(run("orbits --uniform 4 --triple 1 2 5").code == 2);
  CHECK(run("orbits --uniform 4 --triple 1 2").code == 2);
}

TEST_CASE("sample is reproducible") {
  const auto a = run("sample --uniform 4 --steps 20000 --seed 3");
  const auto b = run("sample --uniform 4 --steps 20000 --seed 3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["algorithm"] == "mt19937_64/splitmix64-v1");
  CHECK(run("sample --uniform 7 --steps 10").code == 2);
}

TEST_CASE("help lists the subcommands") {
  const auto r = run("--help");
  CHECK(r.code == 0);
  for (const char* s : {"spectrum", "verify", "eigfun", "orbits", "sample"}) CHECK(r.out.find(s) != std::string::npos);
}
