#pragma once

// The chain's operators on R^{S_n}: E_r, F_r = I - E_r, K = mean of E_r,
// L = I - K, the stationary distribution mu and the mu-weighted inner product.
//
// Vectors over S_n are contiguous arrays indexed by the lexicographic rank.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fillgap/params.hpp"
#include "fillgap/permutation.hpp"

namespace fillgap {

using Vec = std::vector<double>;

// Rank-indexed tables for S_n, independent of the parameter vector.
class StateSpace {
 public:
  // Cached per n; n in [2, kMaxN].
  static std::shared_ptr<const StateSpace> get(int n);

  int n() const { return n_; }
  std::size_t size() const { return size_; }

  // 1-based labels of the state with the given rank.
  std::span<const std::uint8_t> labels(std::size_t idx) const {
    return {labels_.data() + idx * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  int label_at(std::size_t idx, int position) const { return labels(idx)[static_cast<std::size_t>(position - 1)]; }
  int position_of(std::size_t idx, int label) const;

  // Rank of x^{tau_r} for every x; r in [1, n-1].
  std::span<const std::uint32_t> neighbor(int r) const { return neighbor_[static_cast<std::size_t>(r - 1)]; }
  // (x_r - 1) * n + (x_{r+1} - 1) for every x.
  std::span<const std::uint8_t> pair_code(int r) const { return code_[static_cast<std::size_t>(r - 1)]; }

  explicit StateSpace(int n);

 private:
  int n_;
  std::size_t size_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::vector<std::uint32_t>> neighbor_;
  std::vector<std::vector<std::uint8_t>> code_;
};

struct StationaryDist {
  Vec mu;
  double log_z = 0.0;  // log of the normalizer of prod_{i<j} p_{x_i,x_j}
};

// mu(x) = Z^{-1} prod_{i<j} p_{x_i,x_j}, computed in log space.
StationaryDist stationary(const ParamVector& pv);
// Exact weights for exact-rational vectors, n <= kMaxDenseN.
std::vector<mpq_class> stationary_exact(const ParamVector& pv);

class ChainOperator {
 public:
  explicit ChainOperator(const ParamVector& pv);

  const ParamVector& params() const { return pv_; }
  int n() const { return pv_.n(); }
  std::size_t size() const { return states_->size(); }
  const StateSpace& states() const { return *states_; }
  const StationaryDist& stationary() const { return stat_; }
  std::span<const double> mu() const { return stat_.mu; }
  std::span<const double> sqrt_mu() const { return sqrt_mu_; }

  // out may not alias f.
  void apply_E(int r, std::span<const double> f, std::span<double> out) const;
  void apply_F(int r, std::span<const double> f, std::span<double> out) const;
  void apply_K(std::span<const double> f, std::span<double> out) const;
  void apply_L(std::span<const double> f, std::span<double> out) const;
  // D^{1/2} K D^{-1/2} with D = diag(mu); symmetric by reversibility.
  void apply_symmetric(std::span<const double> v, std::span<double> out) const;

  Vec apply_E(int r, std::span<const double> f) const;
  Vec apply_F(int r, std::span<const double> f) const;
  Vec apply_K(std::span<const double> f) const;
  Vec apply_L(std::span<const double> f) const;

  double inner(std::span<const double> f, std::span<const double> g) const;
  double norm(std::span<const double> f) const;

  // Dense matrices, n <= kMaxDenseN.
  Eigen::MatrixXd dense_K() const;
  Eigen::MatrixXd dense_symmetric() const;

 private:
  void check_r(int r) const;
  void check_len(std::size_t len) const;

  ParamVector pv_;
  std::shared_ptr<const StateSpace> states_;
  StationaryDist stat_;
  Vec sqrt_mu_;
  // Indexed by pair code (a-1)*n + (b-1): p_{a,b}, p_{b,a}, sqrt(p_{a,b} p_{b,a}).
  Vec stay_;
  Vec swap_;
  Vec sym_off_;
};

// Convenience wrappers building a ChainOperator per call.
Vec apply_E(const ParamVector& pv, int r, std::span<const double> f);
Vec apply_F(const ParamVector& pv, int r, std::span<const double> f);
Vec apply_K(const ParamVector& pv, std::span<const double> f);
Vec apply_L(const ParamVector& pv, std::span<const double> f);
double inner(const ParamVector& pv, std::span<const double> f, std::span<const double> g);

// ||F_r F_s f - F_s F_r f|| in the mu-norm; requires |r - s| > 1.
double commutation_check(const ChainOperator& op, int r, int s, std::span<const double> f);

void write_csv(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace fillgap
