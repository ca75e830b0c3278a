#pragma once

// Spectra of K: dense and matrix-free solvers, clustering and multiplicity at
// 1 - lambda_*, orbit blocks M_O and the comparison tridiagonal matrix.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "fillgap/chain.hpp"
#include "fillgap/params.hpp"

namespace fillgap {

// lambda_* = (1 - cos(pi/n)) / (n - 1), the gap of the uniform chain.
double lambda_star(int n);

inline constexpr double kDenseClusterTol = 1e-9;
inline constexpr double kIterativeClusterTol = 1e-7;

enum class SpectrumMethod { Dense, Iterative };

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
  // Largest ||S v - theta v|| over members; NaN when no eigenvectors were formed.
  double residual = 0.0;
};

struct SpectrumReport {
  int n = 0;
  std::vector<double> eigenvalues;  // of K, descending
  double gap = 0.0;                 // 1 - (second largest eigenvalue)
  double lambda_star = 0.0;
  int multiplicity_at_target = 0;   // # eigenvalues within cluster_tol of 1 - lambda_*
  double cluster_tol = 0.0;
  SpectrumMethod method = SpectrumMethod::Dense;
  std::vector<EigenCluster> clusters;  // descending by value
  bool converged = true;
  int matvecs = 0;
};

// Groups a descending list into runs whose neighbours differ by at most tol.
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& descending, double tol);
int count_near(const std::vector<double>& values, double target, double tol);

// Full dense spectrum of K through the symmetrized matrix; n <= kMaxDenseN.
SpectrumReport spectrum_dense(const ParamVector& pv, double cluster_tol = kDenseClusterTol);
SpectrumReport spectrum_dense(const ChainOperator& op, double cluster_tol = kDenseClusterTol);

struct Eigenpairs {
  std::vector<double> values;  // eigenvalues of K
  // Eigenvectors of K, orthonormal in the mu-weighted inner product.
  std::vector<Vec> vectors;
};

// Dense eigenpairs of K with |theta - target| <= tol; n <= kMaxDenseN.
Eigenpairs dense_eigenpairs_near(const ChainOperator& op, double target, double tol);
// Dense eigenpairs for the `count` largest eigenvalues.
Eigenpairs dense_top_eigenpairs(const ChainOperator& op, int count);

struct IterativeOptions {
  double cluster_tol = kIterativeClusterTol;
  int max_restarts = 400;
  int guard = 4;          // extra block columns beyond k
  int max_basis = 0;      // 0: chosen from N and the block size
  std::uint64_t seed = 20240601;
};

struct IterativeResult {
  SpectrumReport report;
  Eigenpairs pairs;       // top-k, K-space vectors
  std::vector<double> residuals;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, IterativeResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const IterativeResult& partial() const { return partial_; }

 private:
  IterativeResult partial_;
};

// Top-k eigenvalues of K by a restarted block Krylov method with full
// reorthogonalization on the symmetrized operator. Each reported value has
// ||S v - theta v|| <= tol. Requires n <= kMaxN and k >= n.
IterativeResult spectrum_iterative_full(const ParamVector& pv, int k, double tol, const IterativeOptions& opt = {});
SpectrumReport spectrum_iterative(const ParamVector& pv, int k, double tol, const IterativeOptions& opt = {});

// M_O = (E_r + E_{r+1}) restricted to one G_r orbit, in the basis
// (i,j,k), (j,i,k), (i,k,j), (j,k,i), (k,i,j), (k,j,i).
struct OrbitBlock {
  std::array<int, 3> labels{};
  Eigen::Matrix<double, 6, 6> matrix;
  double s = 0.0;
};

OrbitBlock orbit_block(const ParamVector& pv, int i, int j, int k);
// Ascending eigenvalues, via the block's own detailed-balance symmetrization.
std::array<double, 6> orbit_block_eigenvalues(const OrbitBlock& block, const ParamVector& pv);

using RationalMatrix6 = std::array<std::array<mpq_class, 6>, 6>;
RationalMatrix6 orbit_block_exact(const ParamVector& pv, int i, int j, int k);

// Coefficients of det(alpha I - A), ascending in powers of alpha.
std::vector<mpq_class> charpoly(const RationalMatrix6& a);

struct CharpolyCheck {
  bool holds = false;
  mpq_class s;
  std::vector<mpq_class> computed;  // ascending
  std::vector<mpq_class> expected;  // alpha (alpha - 2) (alpha^2 - 2 alpha + 1 - s)^2
};

// Exact comparison of the block's characteristic polynomial with the
// factored form; ModeError for float vectors.
CharpolyCheck orbit_charpoly_check(const ParamVector& pv, int i, int j, int k);

// {1 - 2 m cos(k pi / n) : k = 1..n-1}, ascending.
std::vector<double> tridiag_eigs(double m, int n);
// Same values from an eigendecomposition of tridiag(-m, 1, -m) of order n-1.
std::vector<double> tridiag_eigs_direct(double m, int n);

std::string to_json(const SpectrumReport& rep);
std::string to_csv(const SpectrumReport& rep);
std::string method_name(SpectrumMethod m);

}  // namespace fillgap
