#pragma once

// Instance and batch checks of the two statements about regular vectors:
// the gap equals lambda_* exactly when some label is neutral, and the
// multiplicity of lambda_* is N, or n-1 when N is n-2 or n.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fillgap/params.hpp"

namespace fillgap {

inline constexpr double kDefaultTolGap = 1e-8;

struct VerdictRow {
  int n = 0;
  std::string family;
  std::uint64_t seed = 0;
  int N = 0;
  std::optional<int> A;
  std::optional<int> B;
  double gap = 0.0;
  double lambda_star = 0.0;
  double margin = 0.0;  // gap - lambda_star
  bool gap_matches = false;
  int M_computed = 0;
  int M_predicted = 0;
  bool pass = false;
  std::string method;
  std::string error;    // non-empty when the instance could not be evaluated
  double runtime_ms = 0.0;
};

// N if N is not n-2 or n, otherwise n-1.
int predicted_multiplicity(int n, int N);

// Dense spectrum for n <= kMaxDenseN, iterative beyond. PreconditionError on
// a non-regular vector; ArgumentError for n < 3.
VerdictRow verify_instance(const ParamVector& pv, double tol_gap = kDefaultTolGap);

struct SweepInstance {
  std::string family;
  ParamVector pv;
};

struct SweepConfig {
  std::vector<int> ns;
  // uniform, neutral_interval (every A <= B), regular_random, no_neutral
  std::vector<std::string> families;
  int seeds = 20;
  std::uint64_t base_seed = 1;
  double tol_gap = kDefaultTolGap;
  std::vector<SweepInstance> instances;  // evaluated after the generated ones
  int threads = 1;  // instances are independent; rows keep config order regardless
};

SweepConfig sweep_config_from_json(const std::string& text);

struct SweepResult {
  std::vector<VerdictRow> rows;
  int passed = 0;
  int failed = 0;
  bool all_passed() const { return failed == 0; }
};

// Rows in config order. Instance errors become failing rows; an invalid
// config (n < 3, unknown family) throws ArgumentError before any work.
SweepResult verify_sweep(const SweepConfig& cfg);

std::string to_json(const VerdictRow& row, bool with_runtime = false);
std::string csv_header(bool with_runtime = false);
std::string to_csv(const VerdictRow& row, bool with_runtime = false);

}  // namespace fillgap
