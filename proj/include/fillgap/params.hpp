#pragma once

// Parameter vectors (p_{i,j}) of the adjacent-transposition chain.
//
// Only the upper triangle i < j is stored; p_{j,i} is always derived as
// 1 - p_{i,j}. A vector is either plain float64 or exact-rational; the exact
// form also carries the rounded doubles so every float routine accepts it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace fillgap {

enum class NumericMode { Float64, ExactRational };

class ParamVector {
 public:
  // Entries of the upper triangle in row-major order: (1,2),(1,3),...,(1,n),(2,3),...
  static ParamVector from_upper(int n, std::vector<double> upper);
  static ParamVector from_upper_exact(int n, std::vector<mpq_class> upper);
  static ParamVector uniform(int n);
  static ParamVector uniform_exact(int n);

  template <class F>
  static ParamVector from_function(int n, F&& value_of_pair) {
    std::vector<double> upper;
    upper.reserve(pair_count(n));
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) upper.push_back(value_of_pair(i, j));
    return from_upper(n, std::move(upper));
  }

  int n() const { return n_; }
  NumericMode mode() const { return exact_.empty() ? NumericMode::Float64 : NumericMode::ExactRational; }
  bool is_exact() const { return !exact_.empty(); }

  // p_{i,j} for any i != j in [1, n].
  double operator()(int i, int j) const;
  // Exact p_{i,j}; ModeError for float vectors.
  mpq_class exact(int i, int j) const;

  std::span<const double> upper() const { return upper_; }
  std::span<const mpq_class> upper_exact() const { return exact_; }

  // Copy with p_{i,j} (i < j) replaced; drops exact mode.
  ParamVector with(int i, int j, double value) const;

  static std::size_t pair_count(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2; }
  static std::size_t pair_index(int n, int i, int j);

 private:
  void check_labels(int i, int j) const;

 public:

 private:
  ParamVector(int n, std::vector<double> upper, std::vector<mpq_class> exact);

  int n_ = 0;
  std::vector<double> upper_;
  std::vector<mpq_class> exact_;
};

struct RegularityViolation {
  int family = 0;  // 1: p_{i-1,i} >= 1/2, 2: p_{i-1,j} >= p_{i,j}, 3: p_{i,j+1} >= p_{i,j}
  int i = 0;
  int j = 0;  // unused (0) for family 1
};

struct RegularityReport {
  bool regular = true;
  std::vector<RegularityViolation> violations;
  explicit operator bool() const { return regular; }
};

RegularityReport is_regular(const ParamVector& pv);

struct NeutralSummary {
  std::vector<int> labels;  // increasing
  int count = 0;
  std::optional<int> min_label;  // A
  std::optional<int> max_label;  // B
  bool is_interval() const;
};

inline constexpr double kDefaultNeutralEps = 1e-12;

// c is neutral iff |p_{c,i} - 1/2| <= eps for all i != c. Exact vectors are
// compared exactly and eps is ignored.
NeutralSummary neutral_labels(const ParamVector& pv, double eps = kDefaultNeutralEps);

bool is_uniform(const ParamVector& pv, double eps = kDefaultNeutralEps);

// s_O = p_{i,j} p_{j,k} p_{k,i} + p_{k,j} p_{j,i} p_{i,k} for i < j < k.
double s_orbit(const ParamVector& pv, int i, int j, int k);
mpq_class s_orbit_exact(const ParamVector& pv, int i, int j, int k);

// max over triples of sqrt(s_O); ArgumentError when n < 3.
double m_p(const ParamVector& pv);

// Test families.
ParamVector gen_uniform(int n);
// Regular, neutral set exactly [A, B]; requires 2 <= A <= B <= n-1.
ParamVector gen_neutral_interval(int n, int A, int B, std::uint64_t seed);
// Regular via cumulative monotone increments; may or may not have neutral labels.
ParamVector gen_regular_random(int n, std::uint64_t seed);
// Regular with every p_{i,j} > 1/2 for i < j, so no label is neutral.
ParamVector gen_no_neutral(int n, std::uint64_t seed);
// Exact-rational regular vector with small denominators.
ParamVector gen_regular_random_exact(int n, std::uint64_t seed);

// {"n": n, "p": [{"i": i, "j": j, "v": v}, ...]}; exact entries as "num/den" strings.
std::string to_json(const ParamVector& pv);
ParamVector param_vector_from_json(const std::string& text);

}  // namespace fillgap
