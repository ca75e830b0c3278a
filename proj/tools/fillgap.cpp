// fillgap: spectra, eigenfunctions and theorem checks for the
// adjacent-transposition chain.
//
// Exit codes: 0 pass, 1 a verification failed, 2 usage or input error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fillgap/eigenstructure.hpp"
#include "fillgap/errors.hpp"
#include "fillgap/params.hpp"
#include "fillgap/sampler.hpp"
#include "fillgap/spectral.hpp"
#include "fillgap/verify.hpp"

using namespace fillgap;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct InputOpts {
  std::string params_file;
  int uniform_n = 0;
};

void add_input(CLI::App* cmd, InputOpts& in) {
  auto* p = cmd->add_option("--params", in.params_file, "Parameter vector JSON file {\"n\":..,\"p\":[{\"i\",\"j\",\"v\"}]}")
                ->check(CLI::ExistingFile);
  auto* u = cmd->add_option("--uniform", in.uniform_n, "Use the uniform vector p = 1/2 on n labels")
                ->check(CLI::Range(2, kMaxN));
  p->excludes(u);
  u->excludes(p);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ParamVector load_params(const InputOpts& in, bool exact = false) {
  if (!in.params_file.empty()) return param_vector_from_json(read_file(in.params_file));
  if (in.uniform_n > 0) return exact ? ParamVector::uniform_exact(in.uniform_n) : ParamVector::uniform(in.uniform_n);
  throw ArgumentError("one of --params or --uniform is required");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void print_table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) std::cout << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

int threads_from_env() {
  if (const char* env = std::getenv("FILLGAP_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

// ---------------------------------------------------------------------------

struct SpectrumOpts {
  InputOpts in;
  std::string method = "auto";
  int k = 0;
  double tol = 1e-10;
  double cluster_tol = -1;
  std::string format = "json";
};

int cmd_spectrum(const SpectrumOpts& o) {
  const ParamVector pv = load_params(o.in);
  const int n = pv.n();
  const bool dense = o.method == "dense" || (o.method == "auto" && n <= kMaxDenseN);
  SpectrumReport rep;
  if (dense) {
    rep = spectrum_dense(pv, o.cluster_tol > 0 ? o.cluster_tol : kDenseClusterTol);
  } else {
    IterativeOptions opt;
    if (o.cluster_tol > 0) opt.cluster_tol = o.cluster_tol;
    rep = spectrum_iterative(pv, o.k > 0 ? o.k : n + 2, o.tol, opt);
  }
  const auto neutral = neutral_labels(pv);
  const bool regular = static_cast<bool>(is_regular(pv));
  std::optional<bool> verdict;
  int predicted = 0;
  if (regular && n >= 3) {
    predicted = neutral.count >= 1 ? predicted_multiplicity(n, neutral.count) : 0;
    const bool gap_matches = std::abs(rep.gap - rep.lambda_star) <= kDefaultTolGap;
    verdict = gap_matches == (neutral.count >= 1) && (neutral.count == 0 || rep.multiplicity_at_target == predicted);
  }

  if (o.format == "csv") {
    std::cout << to_csv(rep);
  } else if (o.format == "table") {
    print_table({{"n", std::to_string(n)},
                 {"method", method_name(rep.method)},
                 {"gap", fmt(rep.gap)},
                 {"lambda_star", fmt(rep.lambda_star)},
                 {"M", std::to_string(rep.multiplicity_at_target)},
                 {"N", std::to_string(neutral.count)},
                 {"M_predicted", verdict ? std::to_string(predicted) : "n/a"},
                 {"regular", regular ? "yes" : "no"},
                 {"verdict", verdict ? (*verdict ? "pass" : "FAIL") : "n/a"},
                 {"eigenvalues", join(rep.eigenvalues.size() > 12
                                          ? std::vector<double>(rep.eigenvalues.begin(), rep.eigenvalues.begin() + 12)
                                          : rep.eigenvalues)}});
  } else {
    auto j = ojson::parse(to_json(rep));
    j["N"] = neutral.count;
    j["regular"] = regular;
    j["M_predicted"] = verdict ? ojson(predicted) : ojson(nullptr);
    j["verdict"] = verdict ? ojson(*verdict ? "pass" : "fail") : ojson("n/a");
    std::cout << j.dump() << '\n';
  }
  return verdict.value_or(true) ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
  std::string sweep_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_gap;
  int threads = 0;
  bool timing = false;
  std::string format = "json";
};

int cmd_verify(const VerifyOpts& o) {
  SweepConfig cfg;
  if (!o.sweep_file.empty()) {
    cfg = sweep_config_from_json(read_file(o.sweep_file));
  } else {
    cfg.ns = {3, 4, 5};
    cfg.families = {"uniform", "neutral_interval", "regular_random", "no_neutral"};
  }
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.tol_gap) cfg.tol_gap = *o.tol_gap;
  cfg.threads = o.threads > 0 ? o.threads : threads_from_env();
  const SweepResult res = verify_sweep(cfg);

  if (o.format == "csv") {
    std::cout << csv_header(o.timing) << '\n';
    for (const auto& r : res.rows) std::cout << to_csv(r, o.timing) << '\n';
  } else if (o.format == "table") {
    std::cout << std::left << std::setw(4) << "n" << std::setw(18) << "family" << std::setw(8) << "seed" << std::setw(4)
              << "N" << std::setw(4) << "M" << std::setw(6) << "Mpred" << std::setw(24) << "gap - lambda_*"
              << "verdict\n";
    for (const auto& r : res.rows) {
      std::cout << std::setw(4) << r.n << std::setw(18) << r.family << std::setw(8) << r.seed << std::setw(4) << r.N
                << std::setw(4) << r.M_computed << std::setw(6) << r.M_predicted << std::setw(24) << fmt(r.margin)
                << (r.pass ? "pass" : "FAIL " + r.error) << '\n';
    }
    std::cout << "passed " << res.passed << ", failed " << res.failed << '\n';
  } else {
    for (const auto& r : res.rows) std::cout << to_json(r, o.timing) << '\n';
  }
  for (const auto& r : res.rows)
    if (!r.error.empty()) std::cerr << "row n=" << r.n << " family=" << r.family << " seed=" << r.seed << ": " << r.error << '\n';
  return res.all_passed() ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct EigfunOpts {
  InputOpts in;
  std::string which = "f_c";
  int c = 0;
  std::string format = "json";
};

int cmd_eigfun(const EigfunOpts& o) {
  const ParamVector pv = load_params(o.in);
  const int n = pv.n();
  const ChainOperator op(pv);
  const double a = a0(n);
  EigData e;
  std::vector<double> expected(static_cast<std::size_t>(n - 1), 0.0);
  if (o.which == "psi") {
    e = psi(op);
    expected.front() = a;
    expected.back() = pv(1, n) / pv(n, 1) * a;
  } else {
    if (o.c < 1 || o.c > n) throw ArgumentError("--c must be a label in 1..n");
    e = wilson_f(op, o.c);
    if (o.c <= n - 1) expected[static_cast<std::size_t>(o.c - 1)] += a;
    if (o.c >= 2) expected[static_cast<std::size_t>(o.c - 2)] -= a;
  }
  const UTable u = extract_U(op, e);
  double d_err = 0.0;
  for (std::size_t r = 0; r < expected.size(); ++r) d_err = std::max(d_err, std::abs(u.D[r] - expected[r]));
  const double d_sum = std::accumulate(u.D.begin(), u.D.end(), 0.0);
  // f_c has coordinate sum zero; psi does not, so it lies outside span{f_2..f_{n-1}}.
  const bool independent = o.which == "psi" ? std::abs(d_sum) > 1e-9 : std::abs(d_sum) <= 1e-12;
  const bool ok = e.residual <= 1e-12 && d_err <= 1e-12 && independent;

  if (o.format == "table") {
    print_table({{"which", o.which == "psi" ? "psi" : "f_" + std::to_string(o.c)},
                 {"n", std::to_string(n)},
                 {"lambda", fmt(e.lambda)},
                 {"residual", fmt(e.residual)},
                 {"a0", fmt(a)},
                 {"D", join(u.D)},
                 {"D_expected", join(expected)},
                 {"D_max_error", fmt(d_err)},
                 {"D_sum", fmt(d_sum)},
                 {"verdict", ok ? "pass" : "FAIL"}});
  } else if (o.format == "csv") {
    std::cout << "r,D,D_expected\n";
    for (std::size_t r = 0; r < u.D.size(); ++r) std::cout << r + 1 << ',' << fmt(u.D[r]) << ',' << fmt(expected[r]) << '\n';
  } else {
    ojson j;
    j["which"] = o.which;
    if (o.which != "psi") j["c"] = o.c;
    j["n"] = n;
    j["lambda"] = e.lambda;
    j["residual"] = e.residual;
    j["a0"] = a;
    j["D"] = u.D;
    j["D_expected"] = expected;
    j["D_max_error"] = d_err;
    j["D_sum"] = d_sum;
    j["independent_of_f"] = o.which == "psi" ? ojson(independent) : ojson(nullptr);
    j["verdict"] = ok ? "pass" : "fail";
    std::cout << j.dump() << '\n';
  }
  return ok ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct OrbitsOpts {
  InputOpts in;
  std::vector<int> triple;
  bool exact = false;
  std::string format = "json";
};

int cmd_orbits(const OrbitsOpts& o) {
  const ParamVector pv = load_params(o.in, o.exact);
  if (o.triple.size() != 3) throw ArgumentError("--triple takes three labels i j k");
  const int i = o.triple[0], j = o.triple[1], k = o.triple[2];
  const OrbitBlock block = orbit_block(pv, i, j, k);
  const auto eig = orbit_block_eigenvalues(block, pv);
  std::vector<double> expected{0.0, 2.0, 1.0 - std::sqrt(block.s), 1.0 + std::sqrt(block.s)};
  std::sort(expected.begin(), expected.end());
  expected = {expected[0], expected[1], expected[1], expected[2], expected[2], expected[3]};
  std::sort(expected.begin(), expected.end());
  double err = 0.0;
  for (std::size_t t = 0; t < 6; ++t) err = std::max(err, std::abs(eig[t] - expected[t]));
  bool ok = err <= 1e-12;

  std::optional<CharpolyCheck> cp;
  if (o.exact) {
    cp = orbit_charpoly_check(pv, i, j, k);
    ok = ok && cp->holds;
  }
  auto coeffs = [](const std::vector<mpq_class>& v) {
    std::vector<std::string> s;
    for (const auto& c : v) s.push_back(c.get_str());
    return s;
  };

  if (o.format == "table") {
    std::vector<std::pair<std::string, std::string>> rows{
        {"triple", std::to_string(i) + " " + std::to_string(j) + " " + std::to_string(k)},
        {"s", fmt(block.s)},
        {"eigenvalues", join({eig.begin(), eig.end()})},
        {"expected", join(expected)},
        {"max_error", fmt(err)}};
    if (cp) {
      std::string c;
      for (const auto& s : coeffs(cp->computed)) c += s + " ";
      rows.push_back({"charpoly", c});
      rows.push_back({"charpoly_identity", cp->holds ? "holds" : "FAILS"});
    }
    rows.push_back({"verdict", ok ? "pass" : "FAIL"});
    print_table(rows);
  } else if (o.format == "csv") {
    std::cout << "index,eigenvalue,expected\n";
    for (std::size_t t = 0; t < 6; ++t) std::cout << t << ',' << fmt(eig[t]) << ',' << fmt(expected[t]) << '\n';
  } else {
    ojson jj;
    jj["triple"] = o.triple;
    jj["s"] = block.s;
    jj["eigenvalues"] = std::vector<double>(eig.begin(), eig.end());
    jj["expected"] = expected;
    jj["max_error"] = err;
    if (cp) {
      jj["s_exact"] = cp->s.get_str();
      jj["charpoly"] = coeffs(cp->computed);
      jj["charpoly_expected"] = coeffs(cp->expected);
      jj["charpoly_identity"] = cp->holds;
    }
    jj["verdict"] = ok ? "pass" : "fail";
    std::cout << jj.dump() << '\n';
  }
  return ok ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct SampleOpts {
  InputOpts in;
  std::uint64_t steps = 1000000;
  std::uint64_t burnin = 0;
  std::uint64_t seed = 1;
  bool visits = false;
  std::string format = "json";
};

int cmd_sample(const SampleOpts& o) {
  const ParamVector pv = load_params(o.in);
  const TvResult r = run_tv(pv, o.steps, o.burnin, o.seed);
  if (o.format == "table") {
    print_table({{"algorithm", r.run.algorithm},
                 {"seed", std::to_string(r.run.seed)},
                 {"steps", std::to_string(r.run.steps)},
                 {"burnin", std::to_string(r.run.burnin)},
                 {"tv", fmt(r.tv)}});
  } else if (o.format == "csv") {
    std::cout << "rank,visits\n";
    for (std::size_t x = 0; x < r.run.visits.size(); ++x) std::cout << x << ',' << r.run.visits[x] << '\n';
  } else {
    std::cout << to_json(r, o.visits) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gap checks for the adjacent-transposition chain on S_n"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"json", "csv", "table"};

  SpectrumOpts so;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of K, gap, multiplicity at 1 - lambda_*");
  add_input(spectrum, so.in);
  spectrum->add_option("--method", so.method, "dense, iterative or auto (dense for n <= 7)")
      ->check(CLI::IsMember({"auto", "dense", "iterative"}))
      ->capture_default_str();
  spectrum->add_option("--k", so.k, "Eigenvalues to compute iteratively (default n + 2)");
  spectrum->add_option("--tol", so.tol, "Residual tolerance for the iterative solver")->capture_default_str();
  spectrum->add_option("--cluster-tol", so.cluster_tol, "Clustering tolerance (default 1e-9 dense, 1e-7 iterative)");
  spectrum->add_option("--format", so.format, "json, csv or table")->check(CLI::IsMember(formats))->capture_default_str();

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "Sweep generated and listed instances, one verdict row each");
  verify->add_option("--sweep", vo.sweep_file,
                     "Sweep config JSON {ns, families, seeds, base_seed, tol_gap, instances}; "
                     "default n 3..5, all families, 20 seeds")
      ->check(CLI::ExistingFile);
  verify->add_option("--seed", vo.seed, "Override the base seed");
  verify->add_option("--tol-gap", vo.tol_gap, "Override the gap tolerance (default 1e-8)");
  verify->add_option("--threads", vo.threads, "Worker threads (default FILLGAP_THREADS or 1)");
  verify->add_flag("--timing", vo.timing, "Include runtime_ms (makes output run-dependent)");
  verify->add_option("--format", vo.format, "json (one row per line), csv or table")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();

  EigfunOpts eo;
  auto* eigfun = app.add_subcommand("eigfun", "Build f_c or psi and check its residual and D-vector");
  add_input(eigfun, eo.in);
  eigfun->add_option("--which", eo.which, "f_c or psi")->check(CLI::IsMember({"f_c", "psi"}))->capture_default_str();
  eigfun->add_option("--c", eo.c, "Neutral label for f_c");
  eigfun->add_option("--format", eo.format, "json, csv or table")->check(CLI::IsMember(formats))->capture_default_str();

  OrbitsOpts oo;
  auto* orbits = app.add_subcommand("orbits", "Spectrum of the 6x6 block of one three-label orbit");
  add_input(orbits, oo.in);
  orbits->add_option("--triple", oo.triple, "Labels i < j < k")->expected(3)->required();
  orbits->add_flag("--exact", oo.exact, "Also check the characteristic polynomial in rational arithmetic");
  orbits->add_option("--format", oo.format, "json, csv or table")->check(CLI::IsMember(formats))->capture_default_str();

  SampleOpts sm;
  auto* sample = app.add_subcommand("sample", "Simulate the chain and report TV distance to mu (n <= 6)");
  add_input(sample, sm.in);
  sample->add_option("--steps", sm.steps, "Recorded steps")->capture_default_str();
  sample->add_option("--burnin", sm.burnin, "Discarded steps")->capture_default_str();
  sample->add_option("--seed", sm.seed, "RNG seed")->capture_default_str();
  sample->add_flag("--visits", sm.visits, "Include visit counts in JSON output");
  sample->add_option("--format", sm.format, "json, csv (visit counts) or table")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(so);
    if (*verify) return cmd_verify(vo);
    if (*eigfun) return cmd_eigfun(eo);
    if (*orbits) return cmd_orbits(oo);
    if (*sample) return cmd_sample(sm);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const StructureError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
