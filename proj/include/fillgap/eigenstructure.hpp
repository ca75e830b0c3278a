#pragma once

// Eigenfunctions at lambda_* and the structure every such eigenfunction must
// carry: the boundary table U_{a,b} of u_1 = F_1 g, its adjacent entries D_r,
// the orbital relation between triples, and the equality-case identities.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fillgap/chain.hpp"
#include "fillgap/params.hpp"

namespace fillgap {

struct Tolerances {
  double eig = 1e-10;       // ||L g - lambda g|| <= eig * ||g||
  double welldef = 1e-10;   // spread of u_1 within a first-two-labels class, relative to ||u_1||_inf
  double supp_rel = 1e-8;   // support threshold as a fraction of ||u_1||_inf
  double rel = 1e-9;        // orbital relation residual, relative to ||u_1||_inf
  double check = 1e-10;     // equality-case identities, relative to ||g||
  double neutral_eps = kDefaultNeutralEps;
};

// h(r) = cos((r - 1/2) pi / n) for r = 1..n (index r-1).
std::vector<double> h_profile(int n);
// (h(1) - h(2)) / 2
double a0(int n);

struct EigData {
  Vec g;
  double lambda = 0.0;       // eigenvalue of L
  std::vector<double> vr;    // ||F_r g|| in the mu-norm, r = 1..n-1
  double residual = 0.0;     // ||L g - lambda g|| / ||g||
};

EigData make_eigdata(const ChainOperator& op, Vec g, double lambda);

// f_c(x) = h(pos_x(c)); PreconditionError unless c is neutral.
EigData wilson_f(const ChainOperator& op, int c, const Tolerances& tol = {});
EigData wilson_f(const ParamVector& pv, int c, const Tolerances& tol = {});

// The extra eigenfunction when the neutral labels are exactly 2..n-1:
// h(pos 1) - h(pos n) when 1 precedes n, and rho times that otherwise, with
// rho = p_{1,n} / p_{n,1}.
EigData psi(const ChainOperator& op, const Tolerances& tol = {});
EigData psi(const ParamVector& pv, const Tolerances& tol = {});

// Orthonormal (mu-norm) basis of the L-eigenspace at lambda_*, from the dense solver.
std::vector<EigData> lambda_star_eigenbasis(const ChainOperator& op, double cluster_tol = 1e-9);

using LabelPair = std::pair<int, int>;

struct UTable {
  int n = 0;
  std::map<LabelPair, double> U;  // a < b
  std::vector<double> D;          // D_r = U_{r,r+1}, index r-1
  std::set<LabelPair> support;
  double welldef_residual = 0.0;  // relative to u_inf
  double swap_residual = 0.0;     // max |u_1(x^{tau_1}) + (p_ab/p_ba) U_ab|, relative to u_inf
  double u_inf = 0.0;             // ||u_1||_inf
  double supp_threshold = 0.0;

  double at(int a, int b) const { return U.at({a, b}); }
};

// StructureError when e is not at lambda_* or u_1 is not a function of (x_1, x_2).
UTable extract_U(const ChainOperator& op, const EigData& e, const Tolerances& tol = {});

struct OrbitalViolation {
  int i = 0, j = 0, k = 0;
  std::string reason;
  double residual = 0.0;
};

std::vector<OrbitalViolation> check_orbital_relation(const ParamVector& pv, const UTable& u,
                                                     const Tolerances& tol = {});

struct SupportReport {
  bool has_first_row = false;  // some (1, b) in the support
  bool has_last_column = false;  // some (a, n) in the support
  int min_a_last = 0;  // min a with (a, n) in the support
  int max_b_first = 0;  // max b with (1, b) in the support
  bool ordered = false;  // min_a_last <= max_b_first
  bool passed() const { return has_first_row && has_last_column && ordered; }
};

// ArgumentError on empty support.
SupportReport check_support_boundary(const UTable& u);

// Rebuilds every U_{a,b} from the adjacent data: plain partial sums of D for
// non-crossing pairs, 2 p_{j,i} times the sum for crossing ones. D is cut to
// [A-1, B]. The uniform vector uses plain sums throughout.
UTable predicted_U_from_D(const ParamVector& pv, const std::vector<double>& D, const NeutralSummary& neutral);

// max |U_ab - U'_ab| over all pairs.
double max_table_difference(const UTable& a, const UTable& b);

struct EqcaseReport {
  double commute_max = 0.0;      // max ||F_r F_s g - F_s F_r g|| / ||g||, |r-s| > 1
  double product_max = 0.0;      // max ||F_r F_s g|| / ||g||, |r-s| > 1
  double sine_similarity = 1.0;  // cosine between (v_r) and (sin(r pi / n))
  double inner_max = 0.0;        // max |<u_r,u_{r+1}> + v_r v_{r+1} / 2| / ||g||^2
  double orbit_max = 0.0;        // max ||F_1F_2F_1 g_t - F_1 g_t / 4|| / ||g|| over G_1 orbits
  int orbits_checked = 0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

EqcaseReport eqcase_checks(const ChainOperator& op, const EigData& e, const Tolerances& tol = {});

// Numerical rank of the D-vectors (D_{A-1..B}; all of D for the uniform vector).
int dmap_rank(const ChainOperator& op, const std::vector<EigData>& basis, const Tolerances& tol = {});

std::string to_json(const UTable& u);
std::string to_json(const std::vector<OrbitalViolation>& v);

}  // namespace fillgap
