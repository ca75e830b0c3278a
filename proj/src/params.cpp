#include "fillgap/params.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fillgap/errors.hpp"
#include "fillgap/permutation.hpp"
#include "fillgap/rng.hpp"

namespace fillgap {

namespace {

void check_n(int n) {
  if (n < 2 || n > kMaxN) {
    throw ArgumentError("n must lie in [2, " + std::to_string(kMaxN) + "], got " + std::to_string(n));
  }
}

void check_label(int n, int c) {
  if (c < 1 || c > n) throw RangeError("label " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
}

const mpq_class kHalf(1, 2);

}  // namespace

std::size_t ParamVector::pair_index(int n, int i, int j) {
  // Row i starts after rows 1..i-1, which hold (n-1) + ... + (n-i+1) entries.
  const auto ii = static_cast<std::size_t>(i - 1);
  const auto nn = static_cast<std::size_t>(n);
  return ii * nn - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

ParamVector::ParamVector(int n, std::vector<double> upper, std::vector<mpq_class> exact)
    : n_(n), upper_(std::move(upper)), exact_(std::move(exact)) {
  check_n(n);
  if (upper_.size() != pair_count(n)) {
    throw ArgumentError("expected " + std::to_string(pair_count(n)) + " upper-triangle entries, got " +
                        std::to_string(upper_.size()));
  }
  for (double v : upper_) {
    if (!(v > 0.0 && v < 1.0)) throw ArgumentError("p_{i,j} must lie in (0,1), got " + std::to_string(v));
  }
  for (const auto& q : exact_) {
    if (q <= 0 || q >= 1) throw ArgumentError("p_{i,j} must lie in (0,1), got " + q.get_str());
  }
}

ParamVector ParamVector::from_upper(int n, std::vector<double> upper) {
  return ParamVector(n, std::move(upper), {});
}

ParamVector ParamVector::from_upper_exact(int n, std::vector<mpq_class> upper) {
  std::vector<double> d;
  d.reserve(upper.size());
  for (auto& q : upper) {
    q.canonicalize();
    d.push_back(q.get_d());
  }
  return ParamVector(n, std::move(d), std::move(upper));
}

ParamVector ParamVector::uniform(int n) {
  check_n(n);
  return from_upper(n, std::vector<double>(pair_count(n), 0.5));
}

ParamVector ParamVector::uniform_exact(int n) {
  check_n(n);
  return from_upper_exact(n, std::vector<mpq_class>(pair_count(n), kHalf));
}

void ParamVector::check_labels(int i, int j) const {
  if (i < 1 || j < 1 || i > n_ || j > n_) {
    throw RangeError("label out of range 1.." + std::to_string(n_) + ": (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
}

double ParamVector::operator()(int i, int j) const {
  if (i == j) throw ArgumentError("p_{i,i} is undefined");
  check_labels(i, j);
  if (i < j) return upper_[pair_index(n_, i, j)];
  return 1.0 - upper_[pair_index(n_, j, i)];
}

mpq_class ParamVector::exact(int i, int j) const {
  if (!is_exact()) throw ModeError("parameter vector is not in exact-rational mode");
  if (i == j) throw ArgumentError("p_{i,i} is undefined");
  check_labels(i, j);
  if (i < j) return exact_[pair_index(n_, i, j)];
  return 1 - exact_[pair_index(n_, j, i)];
}

ParamVector ParamVector::with(int i, int j, double value) const {
  if (!(i < j)) throw ArgumentError("with() expects i < j");
  check_label(n_, i);
  check_label(n_, j);
  auto upper = upper_;
  upper[pair_index(n_, i, j)] = value;
  return from_upper(n_, std::move(upper));
}

RegularityReport is_regular(const ParamVector& pv) {
  const int n = pv.n();
  RegularityReport rep;
  auto fail = [&](int family, int i, int j) {
    rep.regular = false;
    rep.violations.push_back({family, i, j});
  };
  if (pv.is_exact()) {
    for (int i = 2; i <= n; ++i)
      if (pv.exact(i - 1, i) < kHalf) fail(1, i, 0);
    for (int i = 2; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (pv.exact(i - 1, j) < pv.exact(i, j)) fail(2, i, j);
    for (int i = 1; i <= n - 1; ++i)
      for (int j = i + 1; j <= n - 1; ++j)
        if (pv.exact(i, j + 1) < pv.exact(i, j)) fail(3, i, j);
    return rep;
  }
  for (int i = 2; i <= n; ++i)
    if (pv(i - 1, i) < 0.5) fail(1, i, 0);
  for (int i = 2; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (pv(i - 1, j) < pv(i, j)) fail(2, i, j);
  for (int i = 1; i <= n - 1; ++i)
    for (int j = i + 1; j <= n - 1; ++j)
      if (pv(i, j + 1) < pv(i, j)) fail(3, i, j);
  return rep;
}

bool NeutralSummary::is_interval() const {
  if (count == 0) return true;
  return *max_label - *min_label + 1 == count;
}

NeutralSummary neutral_labels(const ParamVector& pv, double eps) {
  const int n = pv.n();
  NeutralSummary s;
  for (int c = 1; c <= n; ++c) {
    bool neutral = true;
    for (int i = 1; i <= n && neutral; ++i) {
      if (i == c) continue;
      neutral = pv.is_exact() ? pv.exact(c, i) == kHalf : std::abs(pv(c, i) - 0.5) <= eps;
    }
    if (neutral) s.labels.push_back(c);
  }
  s.count = static_cast<int>(s.labels.size());
  if (s.count > 0) {
    s.min_label = s.labels.front();
    s.max_label = s.labels.back();
  }
  return s;
}

bool is_uniform(const ParamVector& pv, double eps) {
  return neutral_labels(pv, eps).count == pv.n();
}

namespace {
void check_triple(const ParamVector& pv, int i, int j, int k) {
  check_label(pv.n(), i);
  check_label(pv.n(), k);
  if (!(i < j && j < k)) throw ArgumentError("orbit triple must be strictly increasing");
}
}  // namespace

double s_orbit(const ParamVector& pv, int i, int j, int k) {
  check_triple(pv, i, j, k);
  return pv(i, j) * pv(j, k) * pv(k, i) + pv(k, j) * pv(j, i) * pv(i, k);
}

mpq_class s_orbit_exact(const ParamVector& pv, int i, int j, int k) {
  check_triple(pv, i, j, k);
  mpq_class s = pv.exact(i, j) * pv.exact(j, k) * pv.exact(k, i) + pv.exact(k, j) * pv.exact(j, i) * pv.exact(i, k);
  s.canonicalize();
  return s;
}

double m_p(const ParamVector& pv) {
  const int n = pv.n();
  if (n < 3) throw ArgumentError("m_p needs n >= 3");
  double best = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) best = std::max(best, std::sqrt(s_orbit(pv, i, j, k)));
  return best;
}

// ---------------------------------------------------------------------------
// Generators

ParamVector gen_uniform(int n) { return ParamVector::uniform(n); }

ParamVector gen_neutral_interval(int n, int A, int B, std::uint64_t seed) {
  check_n(n);
  if (n < 3 || !(2 <= A && A <= B && B <= n - 1)) {
    throw ArgumentError("gen_neutral_interval needs 2 <= A <= B <= n-1 (n=" + std::to_string(n) + ", A=" +
                        std::to_string(A) + ", B=" + std::to_string(B) + ")");
  }
  Rng rng(seed);
  // p_{i,j} = 1/2 + q_i r_j on crossing pairs; q nonincreasing in i, r nondecreasing in j.
  std::vector<double> q(static_cast<std::size_t>(A - 1));
  std::vector<double> r(static_cast<std::size_t>(n - B));
  for (auto& v : q) v = rng.uniform(0.15, 0.6);
  for (auto& v : r) v = rng.uniform(0.15, 0.6);
  std::sort(q.begin(), q.end(), std::greater<>());
  std::sort(r.begin(), r.end());
  return ParamVector::from_function(n, [&](int i, int j) {
    if (i < A && j > B) return 0.5 + q[static_cast<std::size_t>(i - 1)] * r[static_cast<std::size_t>(j - B - 1)];
    return 0.5;
  });
}

namespace {

// Cumulative monotone increments: delta(i,j) = max(delta(i+1,j), delta(i,j-1)) + eps(i,j)
// is nonincreasing in i and nondecreasing in j, which is exactly regularity for 1/2 + delta.
std::vector<double> cumulative_deltas(int n, Rng& rng, double zero_probability) {
  std::vector<double> delta(ParamVector::pair_count(n), 0.0);
  auto at = [&](int i, int j) -> double& { return delta[ParamVector::pair_index(n, i, j)]; };
  for (int i = n - 1; i >= 1; --i) {
    for (int j = i + 1; j <= n; ++j) {
      double base = 0.0;
      if (i + 1 < j) base = std::max(base, at(i + 1, j));
      if (j - 1 > i) base = std::max(base, at(i, j - 1));
      const double inc = rng.bernoulli(zero_probability) ? 0.0 : rng.uniform(0.05, 1.0);
      at(i, j) = base + inc;
    }
  }
  return delta;
}

ParamVector from_deltas(int n, std::vector<double> delta, double top) {
  const double mx = *std::max_element(delta.begin(), delta.end());
  const double scale = mx > 0.0 ? top / mx : 0.0;
  for (auto& d : delta) d = 0.5 + d * scale;
  return ParamVector::from_upper(n, std::move(delta));
}

}  // namespace

ParamVector gen_regular_random(int n, std::uint64_t seed) {
  check_n(n);
  Rng rng(seed);
  auto delta = cumulative_deltas(n, rng, 0.3);
  const double top = rng.uniform(0.2, 0.45);
  return from_deltas(n, std::move(delta), top);
}

ParamVector gen_no_neutral(int n, std::uint64_t seed) {
  check_n(n);
  Rng rng(seed);
  auto delta = cumulative_deltas(n, rng, 0.0);
  const double top = rng.uniform(0.2, 0.45);
  return from_deltas(n, std::move(delta), top);
}

ParamVector gen_regular_random_exact(int n, std::uint64_t seed) {
  check_n(n);
  Rng rng(seed);
  std::vector<long> delta(ParamVector::pair_count(n), 0);
  auto at = [&](int i, int j) -> long& { return delta[ParamVector::pair_index(n, i, j)]; };
  for (int i = n - 1; i >= 1; --i) {
    for (int j = i + 1; j <= n; ++j) {
      long base = 0;
      if (i + 1 < j) base = std::max(base, at(i + 1, j));
      if (j - 1 > i) base = std::max(base, at(i, j - 1));
      at(i, j) = base + static_cast<long>(rng.below(6));
    }
  }
  const long mx = *std::max_element(delta.begin(), delta.end());
  const long den = 2 * (mx + 1) + static_cast<long>(rng.below(5));
  std::vector<mpq_class> upper;
  upper.reserve(delta.size());
  for (long d : delta) upper.push_back(kHalf + mpq_class(d, den));
  return ParamVector::from_upper_exact(n, std::move(upper));
}

// ---------------------------------------------------------------------------
// JSON

std::string to_json(const ParamVector& pv) {
  nlohmann::json j;
  j["n"] = pv.n();
  auto& arr = j["p"] = nlohmann::json::array();
  const int n = pv.n();
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      nlohmann::json e{{"i", a}, {"j", b}};
      if (pv.is_exact()) {
        e["v"] = pv.exact(a, b).get_str();
      } else {
        e["v"] = pv(a, b);
      }
      arr.push_back(std::move(e));
    }
  }
  return j.dump();
}

ParamVector param_vector_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid parameter-vector JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("p") || !j["n"].is_number_integer() || !j["p"].is_array()) {
    throw ArgumentError("parameter-vector JSON needs integer \"n\" and array \"p\"");
  }
  const int n = j["n"].get<int>();
  check_n(n);
  const std::size_t m = ParamVector::pair_count(n);
  std::vector<mpq_class> exact(m);
  std::vector<double> flt(m);
  std::vector<bool> seen(m, false);
  bool any_string = false;
  bool any_number = false;
  for (const auto& e : j["p"]) {
    if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e.contains("v") || !e["i"].is_number_integer() ||
        !e["j"].is_number_integer()) {
      throw ArgumentError("each entry of \"p\" needs integer \"i\", \"j\" and a value \"v\"");
    }
    const int a = e["i"].get<int>();
    const int b = e["j"].get<int>();
    if (!(1 <= a && a < b && b <= n)) {
      throw ArgumentError("entry (" + std::to_string(a) + "," + std::to_string(b) + ") is not a pair i < j in [1,n]");
    }
    const std::size_t idx = ParamVector::pair_index(n, a, b);
    if (seen[idx]) throw ArgumentError("duplicate entry (" + std::to_string(a) + "," + std::to_string(b) + ")");
    seen[idx] = true;
    const auto& v = e["v"];
    if (v.is_string()) {
      any_string = true;
      try {
        exact[idx] = mpq_class(v.get<std::string>());
      } catch (const std::invalid_argument&) {
        throw ArgumentError("bad rational \"" + v.get<std::string>() + "\"");
      }
      if (exact[idx].get_den() == 0) throw ArgumentError("zero denominator in \"" + v.get<std::string>() + "\"");
      exact[idx].canonicalize();
    } else if (v.is_number()) {
      any_number = true;
      flt[idx] = v.get<double>();
    } else {
      throw ArgumentError("\"v\" must be a number or a \"num/den\" string");
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ArgumentError("parameter-vector JSON must list every pair 1 <= i < j <= n");
  }
  if (any_string && any_number) throw ArgumentError("mixing rational strings and float entries is not supported");
  if (any_string) return ParamVector::from_upper_exact(n, std::move(exact));
  return ParamVector::from_upper(n, std::move(flt));
}

}  // namespace fillgap
