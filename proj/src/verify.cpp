#include "fillgap/verify.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fillgap/errors.hpp"
#include "fillgap/spectral.hpp"

namespace fillgap {

int predicted_multiplicity(int n, int N) { return (N == n - 2 || N == n) ? n - 1 : N; }

namespace {
void check_n(int n) {
  // On two labels every regular vector has gap lambda_*, neutral or not, so
  // the equivalence is only claimed from n = 3 on.
  if (n < 3) throw ArgumentError("n must be >= 3 (at n = 2 the gap is lambda_* for every regular vector)");
}
}  // namespace

VerdictRow verify_instance(const ParamVector& pv, double tol_gap) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = pv.n();
  check_n(n);
  if (!is_regular(pv)) throw PreconditionError("parameter vector is not regular");

  VerdictRow row;
  row.n = n;
  const auto neutral = neutral_labels(pv);
  row.N = neutral.count;
  row.A = neutral.min_label;
  row.B = neutral.max_label;

  SpectrumReport rep;
  if (n <= kMaxDenseN) {
    rep = spectrum_dense(pv, kDenseClusterTol);
  } else {
    // n + 2 values cover the top eigenvalue and a full cluster of size <= n - 1.
    rep = spectrum_iterative(pv, n + 2, 1e-10, IterativeOptions{});
  }
  row.method = method_name(rep.method);
  row.gap = rep.gap;
  row.lambda_star = rep.lambda_star;
  row.margin = rep.gap - rep.lambda_star;
  row.gap_matches = std::abs(row.margin) <= tol_gap;
  row.M_computed = rep.multiplicity_at_target;
  row.M_predicted = row.N >= 1 ? predicted_multiplicity(n, row.N) : 0;
  row.pass = (row.gap_matches == (row.N >= 1)) && (row.N == 0 || row.M_computed == row.M_predicted) &&
             row.margin >= -tol_gap;
  row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("sweep config must be a JSON object");
  static const char* known[] = {"ns", "families", "seeds", "base_seed", "tol_gap", "instances"};
  for (const auto& [key, v] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ArgumentError("sweep config: unknown key '" + key + "'");
    }
  }
  SweepConfig cfg;
  try {
    if (j.contains("ns")) cfg.ns = j.at("ns").get<std::vector<int>>();
    if (j.contains("families")) cfg.families = j.at("families").get<std::vector<std::string>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<int>();
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("tol_gap")) cfg.tol_gap = j.at("tol_gap").get<double>();
    if (j.contains("instances")) {
      for (const auto& inst : j.at("instances")) {
        const std::string family = inst.value("family", std::string("custom"));
        cfg.instances.push_back({family, param_vector_from_json(inst.at("params").dump())});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("sweep config: ") + e.what());
  }
  if (cfg.seeds < 0) throw ArgumentError("sweep config: seeds must be >= 0");
  return cfg;
}

SweepResult verify_sweep(const SweepConfig& cfg) {
  for (int n : cfg.ns) {
    check_n(n);
    if (n > kMaxN) throw CapacityError("n over cap " + std::to_string(kMaxN));
  }
  for (const auto& f : cfg.families) {
    if (f != "uniform" && f != "neutral_interval" && f != "regular_random" && f != "no_neutral") {
      throw ArgumentError("unknown family '" + f + "'");
    }
  }
  for (const auto& inst : cfg.instances) check_n(inst.pv.n());

  struct Job {
    std::string family;
    std::uint64_t seed;
    int n;
    std::function<ParamVector()> make;
  };
  std::vector<Job> jobs;
  for (int n : cfg.ns) {
    for (const auto& f : cfg.families) {
      if (f == "uniform") {
        jobs.push_back({f, 0, n, [n] { return gen_uniform(n); }});
        continue;
      }
      for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(s);
        if (f == "neutral_interval") {
          for (int A = 2; A <= n - 1; ++A)
            for (int B = A; B <= n - 1; ++B)
              jobs.push_back({f, seed, n, [=] { return gen_neutral_interval(n, A, B, seed); }});
        } else if (f == "regular_random") {
          jobs.push_back({f, seed, n, [=] { return gen_regular_random(n, seed); }});
        } else {
          jobs.push_back({f, seed, n, [=] { return gen_no_neutral(n, seed); }});
        }
      }
    }
  }
  for (const auto& inst : cfg.instances) jobs.push_back({inst.family, 0, inst.pv.n(), [pv = inst.pv] { return pv; }});

  SweepResult out;
  out.rows.resize(jobs.size());
  auto evaluate = [&](std::size_t i) {
    const Job& job = jobs[i];
    VerdictRow row;
    try {
      row = verify_instance(job.make(), cfg.tol_gap);
    } catch (const std::exception& e) {
      row = VerdictRow{};
      row.n = job.n;
      row.error = e.what();
    }
    row.family = job.family;
    row.seed = job.seed;
    out.rows[i] = std::move(row);
  };

  const auto workers = static_cast<std::size_t>(std::max(1, cfg.threads));
  if (workers == 1 || jobs.size() < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) evaluate(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& row : out.rows) (row.pass ? out.passed : out.failed) += 1;
  return out;
}

namespace {
nlohmann::json opt_json(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
std::string opt_csv(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }
}  // namespace

std::string to_json(const VerdictRow& row, bool with_runtime) {
  nlohmann::ordered_json j;
  j["n"] = row.n;
  j["family"] = row.family;
  j["seed"] = row.seed;
  j["N"] = row.N;
  j["A"] = opt_json(row.A);
  j["B"] = opt_json(row.B);
  j["gap"] = row.gap;
  j["lambda_star"] = row.lambda_star;
  j["margin"] = row.margin;
  j["gap_matches"] = row.gap_matches;
  j["M_computed"] = row.M_computed;
  j["M_predicted"] = row.M_predicted;
  j["pass"] = row.pass;
  j["method"] = row.method;
  if (!row.error.empty()) j["error"] = row.error;
  if (with_runtime) j["runtime_ms"] = row.runtime_ms;
  return j.dump();
}

std::string csv_header(bool with_runtime) {
  std::string h = "n,family,seed,N,A,B,gap,lambda_star,margin,gap_matches,M_computed,M_predicted,pass,method,error";
  if (with_runtime) h += ",runtime_ms";
  return h;
}

std::string to_csv(const VerdictRow& row, bool with_runtime) {
  std::ostringstream os;
  os.precision(17);
  std::string err = row.error;
  for (auto& c : err)
    if (c == ',' || c == '\n') c = ';';
  os << row.n << ',' << row.family << ',' << row.seed << ',' << row.N << ',' << opt_csv(row.A) << ','
     << opt_csv(row.B) << ',' << row.gap << ',' << row.lambda_star << ',' << row.margin << ','
     << (row.gap_matches ? "true" : "false") << ',' << row.M_computed << ',' << row.M_predicted << ','
     << (row.pass ? "true" : "false") << ',' << row.method << ',' << err;
  if (with_runtime) os << ',' << row.runtime_ms;
  return os.str();
}

}  // namespace fillgap
