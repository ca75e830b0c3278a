#include "fillgap/eigenstructure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "fillgap/errors.hpp"
#include "fillgap/permutation.hpp"
#include "fillgap/spectral.hpp"

namespace fillgap {

std::vector<double> h_profile(int n) {
  if (n < 2) throw ArgumentError("h_profile needs n >= 2");
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) h[static_cast<std::size_t>(r - 1)] = std::cos((r - 0.5) * std::numbers::pi / n);
  return h;
}

double a0(int n) {
  const auto h = h_profile(n);
  return (h[0] - h[1]) / 2.0;
}

EigData make_eigdata(const ChainOperator& op, Vec g, double lambda) {
  EigData e;
  e.lambda = lambda;
  const Vec lg = op.apply_L(g);
  Vec diff(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) diff[x] = lg[x] - lambda * g[x];
  const double gn = op.norm(g);
  e.residual = gn > 0 ? op.norm(diff) / gn : 0.0;
  for (int r = 1; r < op.n(); ++r) e.vr.push_back(op.norm(op.apply_F(r, g)));
  e.g = std::move(g);
  return e;
}

EigData wilson_f(const ChainOperator& op, int c, const Tolerances& tol) {
  const int n = op.n();
  if (c < 1 || c > n) throw RangeError("label out of range");
  const auto neutral = neutral_labels(op.params(), tol.neutral_eps);
  if (!std::binary_search(neutral.labels.begin(), neutral.labels.end(), c)) {
    throw PreconditionError("label " + std::to_string(c) + " is not neutral");
  }
  const auto h = h_profile(n);
  const auto& st = op.states();
  Vec f(op.size());
  for (std::size_t x = 0; x < f.size(); ++x) f[x] = h[static_cast<std::size_t>(st.position_of(x, c) - 1)];
  return make_eigdata(op, std::move(f), lambda_star(n));
}

EigData wilson_f(const ParamVector& pv, int c, const Tolerances& tol) { return wilson_f(ChainOperator(pv), c, tol); }

EigData psi(const ChainOperator& op, const Tolerances& tol) {
  const int n = op.n();
  const auto neutral = neutral_labels(op.params(), tol.neutral_eps);
  if (n < 3 || neutral.count != n - 2 || neutral.min_label != 2 || neutral.max_label != n - 1) {
    throw PreconditionError("psi needs the neutral labels to be exactly 2..n-1");
  }
  const auto h = h_profile(n);
  const double rho = op.params()(1, n) / op.params()(n, 1);
  const auto& st = op.states();
  Vec f(op.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    const int p1 = st.position_of(x, 1);
    const int pn = st.position_of(x, n);
    const double base = h[static_cast<std::size_t>(p1 - 1)] - h[static_cast<std::size_t>(pn - 1)];
    f[x] = p1 < pn ? base : rho * base;
  }
  return make_eigdata(op, std::move(f), lambda_star(n));
}

EigData psi(const ParamVector& pv, const Tolerances& tol) { return psi(ChainOperator(pv), tol); }

std::vector<EigData> lambda_star_eigenbasis(const ChainOperator& op, double cluster_tol) {
  const double ls = lambda_star(op.n());
  auto pairs = dense_eigenpairs_near(op, 1.0 - ls, cluster_tol);
  std::vector<EigData> out;
  for (std::size_t t = 0; t < pairs.values.size(); ++t) {
    out.push_back(make_eigdata(op, std::move(pairs.vectors[t]), 1.0 - pairs.values[t]));
  }
  return out;
}

UTable extract_U(const ChainOperator& op, const EigData& e, const Tolerances& tol) {
  const int n = op.n();
  const double ls = lambda_star(n);
  if (std::abs(e.lambda - ls) > tol.eig) {
    throw StructureError("eigenvalue " + std::to_string(e.lambda) + " is not lambda_*");
  }
  if (e.g.size() != op.size()) throw ArgumentError("vector length does not match n!");
  const Vec u1 = op.apply_F(1, e.g);
  const auto& st = op.states();
  const auto& pv = op.params();

  UTable t;
  t.n = n;
  for (double v : u1) t.u_inf = std::max(t.u_inf, std::abs(v));
  const double scale = t.u_inf > 0 ? t.u_inf : 1.0;

  // Class extremes over states with x_1 = a, x_2 = b (any order of a, b).
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> lo(nn * nn, INFINITY), hi(nn * nn, -INFINITY);
  for (std::size_t x = 0; x < u1.size(); ++x) {
    const auto slot = static_cast<std::size_t>(st.label_at(x, 1) - 1) * nn + static_cast<std::size_t>(st.label_at(x, 2) - 1);
    lo[slot] = std::min(lo[slot], u1[x]);
    hi[slot] = std::max(hi[slot], u1[x]);
  }
  double spread = 0.0;
  for (std::size_t s = 0; s < lo.size(); ++s)
    if (hi[s] >= lo[s]) spread = std::max(spread, hi[s] - lo[s]);
  t.welldef_residual = spread / scale;
  if (t.welldef_residual > tol.welldef) {
    throw StructureError("u_1 is not a function of the first two labels (spread " +
                         std::to_string(t.welldef_residual) + ")");
  }

  t.supp_threshold = tol.supp_rel * t.u_inf;
  double swap = 0.0;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      const auto ab = static_cast<std::size_t>(a - 1) * nn + static_cast<std::size_t>(b - 1);
      const auto ba = static_cast<std::size_t>(b - 1) * nn + static_cast<std::size_t>(a - 1);
      const double v = 0.5 * (lo[ab] + hi[ab]);
      const double swapped = 0.5 * (lo[ba] + hi[ba]);
      t.U[{a, b}] = v;
      if (std::abs(v) > t.supp_threshold) t.support.insert({a, b});
      swap = std::max(swap, std::abs(swapped + pv(a, b) / pv(b, a) * v));
    }
  }
  t.swap_residual = swap / scale;
  for (int r = 1; r < n; ++r) t.D.push_back(t.U.at({r, r + 1}));
  return t;
}

std::vector<OrbitalViolation> check_orbital_relation(const ParamVector& pv, const UTable& u, const Tolerances& tol) {
  std::vector<OrbitalViolation> out;
  const int n = u.n;
  const double scale = u.u_inf > 0 ? u.u_inf : 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        const double uij = u.at(i, j), ujk = u.at(j, k), uik = u.at(i, k);
        if (std::max({std::abs(uij), std::abs(ujk), std::abs(uik)}) <= u.supp_threshold) continue;
        if (std::abs(pv(i, j) - 0.5) > tol.neutral_eps) {
          out.push_back({i, j, k, "p_ij != 1/2 on a supported triple", std::abs(pv(i, j) - 0.5)});
        }
        if (std::abs(pv(j, k) - 0.5) > tol.neutral_eps) {
          out.push_back({i, j, k, "p_jk != 1/2 on a supported triple", std::abs(pv(j, k) - 0.5)});
        }
        const double res = std::abs(uik - 2.0 * pv(k, i) * (uij + ujk)) / scale;
        if (res > tol.rel) out.push_back({i, j, k, "U_ik != 2 p_ki (U_ij + U_jk)", res});
      }
    }
  }
  return out;
}

SupportReport check_support_boundary(const UTable& u) {
  if (u.support.empty()) throw ArgumentError("empty support");
  SupportReport r;
  r.min_a_last = u.n + 1;
  for (const auto& [a, b] : u.support) {
    if (a == 1) {
      r.has_first_row = true;
      r.max_b_first = std::max(r.max_b_first, b);
    }
    if (b == u.n) {
      r.has_last_column = true;
      r.min_a_last = std::min(r.min_a_last, a);
    }
  }
  if (!r.has_last_column) r.min_a_last = 0;
  r.ordered = r.has_first_row && r.has_last_column && r.min_a_last <= r.max_b_first;
  return r;
}

UTable predicted_U_from_D(const ParamVector& pv, const std::vector<double>& D, const NeutralSummary& neutral) {
  const int n = pv.n();
  if (D.size() != static_cast<std::size_t>(n - 1)) throw ArgumentError("D must have n-1 entries");
  if (neutral.count == 0) throw PreconditionError("prediction needs at least one neutral label");
  const bool uniform = neutral.count == n;
  const int A = uniform ? 1 : *neutral.min_label;
  const int B = uniform ? n : *neutral.max_label;

  std::vector<double> d(D);
  if (!uniform)
    for (int r = 1; r < n; ++r)
      if (r < A - 1 || r > B) d[static_cast<std::size_t>(r - 1)] = 0.0;

  UTable t;
  t.n = n;
  t.D = d;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      double sum = 0.0;
      for (int r = i; r < j; ++r) sum += d[static_cast<std::size_t>(r - 1)];
      const bool crossing = !uniform && i < A && j > B;
      const double v = crossing ? 2.0 * pv(j, i) * sum : sum;
      t.U[{i, j}] = v;
      t.u_inf = std::max(t.u_inf, std::abs(v));
    }
  }
  return t;
}

double max_table_difference(const UTable& a, const UTable& b) {
  if (a.n != b.n) throw ArgumentError("tables have different n");
  double m = 0.0;
  for (const auto& [key, v] : a.U) m = std::max(m, std::abs(v - b.U.at(key)));
  return m;
}

EqcaseReport eqcase_checks(const ChainOperator& op, const EigData& e, const Tolerances& tol) {
  const int n = op.n();
  EqcaseReport rep;
  const double gn = op.norm(e.g);
  const double gscale = gn > 0 ? gn : 1.0;

  std::vector<Vec> u;
  for (int r = 1; r < n; ++r) u.push_back(op.apply_F(r, e.g));

  for (int r = 1; r < n; ++r) {
    for (int s = r + 2; s < n; ++s) {
      rep.commute_max = std::max(rep.commute_max, commutation_check(op, r, s, e.g) / gscale);
      rep.product_max = std::max(rep.product_max, op.norm(op.apply_F(r, u[static_cast<std::size_t>(s - 1)])) / gscale);
    }
  }
  if (rep.product_max > tol.check) rep.failures.push_back("F_r F_s g != 0 for some |r-s| > 1");

  std::vector<double> v;
  for (const auto& ur : u) v.push_back(op.norm(ur));
  double dot = 0, vv = 0, ss = 0;
  for (int r = 1; r < n; ++r) {
    const double s = std::sin(r * std::numbers::pi / n);
    dot += v[static_cast<std::size_t>(r - 1)] * s;
    vv += v[static_cast<std::size_t>(r - 1)] * v[static_cast<std::size_t>(r - 1)];
    ss += s * s;
  }
  rep.sine_similarity = vv > 0 ? dot / std::sqrt(vv * ss) : 0.0;
  if (rep.sine_similarity < 1.0 - tol.check) rep.failures.push_back("v_r is not proportional to sin(r pi / n)");

  for (int r = 1; r + 1 < n; ++r) {
    const auto i = static_cast<std::size_t>(r - 1);
    const double ip = op.inner(u[i], u[i + 1]);
    rep.inner_max = std::max(rep.inner_max, std::abs(ip + 0.5 * v[i] * v[i + 1]) / (gscale * gscale));
  }
  if (rep.inner_max > tol.check) rep.failures.push_back("<u_r, u_{r+1}> != -v_r v_{r+1} / 2");

  if (n >= 3) {
    const Vec& w = u[0];
    const Vec z = op.apply_F(1, op.apply_F(2, w));
    const auto mu = op.mu();
    double w_inf = 0.0;
    for (double x : w) w_inf = std::max(w_inf, std::abs(x));
    const double thr = tol.supp_rel * w_inf;
    for (const auto& orb : orbit_partition(n, 1)) {
      double wn = 0.0, dn = 0.0, wmax = 0.0;
      for (const auto& m : orb.members) {
        const auto x = static_cast<std::size_t>(rank(m));
        wmax = std::max(wmax, std::abs(w[x]));
        wn += mu[x] * w[x] * w[x];
        const double d = z[x] - 0.25 * w[x];
        dn += mu[x] * d * d;
      }
      if (wmax <= thr) continue;
      ++rep.orbits_checked;
      rep.orbit_max = std::max(rep.orbit_max, std::sqrt(dn) / gscale);
    }
    if (rep.orbit_max > tol.check) rep.failures.push_back("F_1 F_2 F_1 g_t != F_1 g_t / 4 on some orbit");
  }
  return rep;
}

int dmap_rank(const ChainOperator& op, const std::vector<EigData>& basis, const Tolerances& tol) {
  if (basis.empty()) return 0;
  const int n = op.n();
  const auto neutral = neutral_labels(op.params(), tol.neutral_eps);
  if (neutral.count == 0) throw PreconditionError("D-map rank needs at least one neutral label");
  const bool uniform = neutral.count == n;
  const int lo = uniform ? 1 : std::max(1, *neutral.min_label - 1);
  const int hi = uniform ? n - 1 : std::min(n - 1, *neutral.max_label);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(basis.size()), hi - lo + 1);
  for (std::size_t t = 0; t < basis.size(); ++t) {
    const UTable u = extract_U(op, basis[t], tol);
    for (int r = lo; r <= hi; ++r) m(static_cast<Eigen::Index>(t), r - lo) = u.D[static_cast<std::size_t>(r - 1)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  return rank;
}

std::string to_json(const UTable& u) {
  nlohmann::json j;
  j["n"] = u.n;
  auto& arr = j["U"] = nlohmann::json::array();
  for (const auto& [key, v] : u.U) arr.push_back({{"a", key.first}, {"b", key.second}, {"v", v}});
  j["D"] = u.D;
  auto& sup = j["support"] = nlohmann::json::array();
  for (const auto& [a, b] : u.support) sup.push_back({a, b});
  j["welldef_residual"] = u.welldef_residual;
  return j.dump();
}

std::string to_json(const std::vector<OrbitalViolation>& v) {
  auto arr = nlohmann::json::array();
  for (const auto& x : v) arr.push_back({{"i", x.i}, {"j", x.j}, {"k", x.k}, {"reason", x.reason}, {"residual", x.residual}});
  return arr.dump();
}

}  // namespace fillgap
