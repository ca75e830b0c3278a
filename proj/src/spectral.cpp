#include "fillgap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <lapacke.h>

#include <json.hpp>

#include "fillgap/errors.hpp"
#include "fillgap/rng.hpp"
#include "fillgap/simd/kernels.hpp"

namespace fillgap {

double lambda_star(int n) {
  if (n < 2) throw ArgumentError("lambda_star needs n >= 2");
  return (1.0 - std::cos(std::numbers::pi / n)) / (n - 1);
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& descending, double tol) {
  std::vector<EigenCluster> out;
  for (std::size_t i = 0; i < descending.size();) {
    std::size_t j = i + 1;
    while (j < descending.size() && descending[j - 1] - descending[j] <= tol) ++j;
    double mean = 0.0;
    for (std::size_t t = i; t < j; ++t) mean += descending[t];
    out.push_back({mean / static_cast<double>(j - i), static_cast<int>(j - i), std::numeric_limits<double>::quiet_NaN()});
    i = j;
  }
  return out;
}

int count_near(const std::vector<double>& values, double target, double tol) {
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [&](double v) { return std::abs(v - target) <= tol; }));
}

namespace {

// One Householder tridiagonalization of the symmetrized matrix, then all
// eigenvalues (dsterf) and the eigenvectors for an index window (dstemr +
// back-transformation).
struct DenseDecomp {
  std::vector<double> ascending;
  Eigen::MatrixXd vectors;  // S-space, columns for ascending indices lo..lo+cols-1
  int lo = 0;
};

using WindowPicker = std::function<std::pair<int, int>(const std::vector<double>&)>;

DenseDecomp dense_decompose(const ChainOperator& op, const WindowPicker& pick) {
  if (op.n() > kMaxDenseN) {
    throw CapacityError("dense spectrum is limited to n <= " + std::to_string(kMaxDenseN) +
                        "; use the iterative solver");
  }
  Eigen::MatrixXd a = op.dense_symmetric();
  const auto N = static_cast<lapack_int>(a.rows());
  std::vector<double> d(static_cast<std::size_t>(N));
  std::vector<double> e(static_cast<std::size_t>(N), 0.0);
  std::vector<double> tau(static_cast<std::size_t>(std::max<lapack_int>(N - 1, 1)));
  if (LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', N, a.data(), N, d.data(), e.data(), tau.data()) != 0) {
    throw std::runtime_error("dsytrd failed");
  }

  DenseDecomp out;
  out.ascending = d;
  {
    std::vector<double> e2 = e;
    if (LAPACKE_dsterf(N, out.ascending.data(), e2.data()) != 0) throw std::runtime_error("dsterf failed");
  }

  const auto [il, iu] = pick(out.ascending);
  if (il > iu) return out;
  const lapack_int want = iu - il + 1;
  Eigen::MatrixXd z(N, want);
  std::vector<double> w(static_cast<std::size_t>(N));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(want));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  std::vector<double> d2 = d;
  std::vector<double> e2 = e;
  if (LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', N, d2.data(), e2.data(), 0.0, 0.0, il + 1, iu + 1, &found, w.data(),
                     z.data(), N, want, isuppz.data(), &tryrac) != 0 ||
      found != want) {
    throw std::runtime_error("dstemr failed");
  }
  if (LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', N, want, a.data(), N, tau.data(), z.data(), N) != 0) {
    throw std::runtime_error("dormtr failed");
  }
  out.vectors = std::move(z);
  out.lo = il;
  return out;
}

Eigenpairs to_k_space(const ChainOperator& op, const DenseDecomp& dd, bool descending) {
  Eigenpairs ep;
  const auto cols = static_cast<int>(dd.vectors.cols());
  const auto sq = op.sqrt_mu();
  for (int t = 0; t < cols; ++t) {
    const int c = descending ? cols - 1 - t : t;
    ep.values.push_back(dd.ascending[static_cast<std::size_t>(dd.lo + c)]);
    Vec g(op.size());
    for (std::size_t x = 0; x < g.size(); ++x) g[x] = dd.vectors(static_cast<Eigen::Index>(x), c) / sq[x];
    ep.vectors.push_back(std::move(g));
  }
  return ep;
}

double symmetric_residual(const ChainOperator& op, std::span<const double> v, double theta) {
  Vec sv(op.size());
  op.apply_symmetric(v, sv);
  double s = 0.0;
  for (std::size_t x = 0; x < sv.size(); ++x) {
    const double d = sv[x] - theta * v[x];
    s += d * d;
  }
  return std::sqrt(s);
}

void finish_report(SpectrumReport& rep) {
  rep.lambda_star = lambda_star(rep.n);
  rep.gap = rep.eigenvalues.size() >= 2 ? 1.0 - rep.eigenvalues[1] : std::numeric_limits<double>::quiet_NaN();
  rep.multiplicity_at_target = count_near(rep.eigenvalues, 1.0 - rep.lambda_star, rep.cluster_tol);
  rep.clusters = cluster_eigenvalues(rep.eigenvalues, rep.cluster_tol);
}

}  // namespace

SpectrumReport spectrum_dense(const ChainOperator& op, double cluster_tol) {
  const int n = op.n();
  // Eigenvectors for the top 2n eigenvalues, widened to a cluster boundary.
  auto pick = [&](const std::vector<double>& asc) {
    const int N = static_cast<int>(asc.size());
    int lo = std::max(0, N - 2 * n);
    while (lo > 0 && asc[static_cast<std::size_t>(lo)] - asc[static_cast<std::size_t>(lo - 1)] <= cluster_tol) --lo;
    return std::pair<int, int>{lo, N - 1};
  };
  const DenseDecomp dd = dense_decompose(op, pick);

  SpectrumReport rep;
  rep.n = n;
  rep.method = SpectrumMethod::Dense;
  rep.cluster_tol = cluster_tol;
  rep.eigenvalues.assign(dd.ascending.rbegin(), dd.ascending.rend());
  finish_report(rep);

  // Residuals of the formed eigenvectors, evaluated matrix-free.
  std::vector<double> res(rep.eigenvalues.size(), std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index c = 0; c < dd.vectors.cols(); ++c) {
    const auto asc_idx = static_cast<std::size_t>(dd.lo + c);
    const double theta = dd.ascending[asc_idx];
    res[dd.ascending.size() - 1 - asc_idx] =
        symmetric_residual(op, {dd.vectors.col(c).data(), op.size()}, theta);
  }
  std::size_t pos0 = 0;
  for (auto& cl : rep.clusters) {
    double worst = std::numeric_limits<double>::quiet_NaN();
    for (int t = 0; t < cl.multiplicity; ++t) {
      const double r = res[pos0 + static_cast<std::size_t>(t)];
      if (!std::isnan(r)) worst = std::isnan(worst) ? r : std::max(worst, r);
    }
    cl.residual = worst;
    pos0 += static_cast<std::size_t>(cl.multiplicity);
  }
  return rep;
}

SpectrumReport spectrum_dense(const ParamVector& pv, double cluster_tol) {
  if (pv.n() > kMaxDenseN) {
    throw CapacityError("dense spectrum is limited to n <= " + std::to_string(kMaxDenseN) +
                        "; use the iterative solver");
  }
  return spectrum_dense(ChainOperator(pv), cluster_tol);
}

Eigenpairs dense_eigenpairs_near(const ChainOperator& op, double target, double tol) {
  auto pick = [&](const std::vector<double>& asc) {
    const auto lo = std::lower_bound(asc.begin(), asc.end(), target - tol) - asc.begin();
    const auto hi = std::upper_bound(asc.begin(), asc.end(), target + tol) - asc.begin();
    return std::pair<int, int>{static_cast<int>(lo), static_cast<int>(hi) - 1};
  };
  return to_k_space(op, dense_decompose(op, pick), true);
}

Eigenpairs dense_top_eigenpairs(const ChainOperator& op, int count) {
  auto pick = [&](const std::vector<double>& asc) {
    const int N = static_cast<int>(asc.size());
    return std::pair<int, int>{std::max(0, N - count), N - 1};
  };
  return to_k_space(op, dense_decompose(op, pick), true);
}

// ---------------------------------------------------------------------------
// Restarted block Krylov

namespace {

void apply_block(const ChainOperator& op, const Eigen::MatrixXd& v, Eigen::MatrixXd& out) {
  const auto N = op.size();
  out.resize(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    op.apply_symmetric({v.col(c).data(), N}, {out.col(c).data(), N});
  }
}

void fill_random(Eigen::Ref<Eigen::VectorXd> v, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-1.0, 1.0);
}

// Columns of w become orthonormal and orthogonal to q.leftCols(qcols).
// Columns that collapse under projection are replaced by random directions.
void orthonormalize_block(const Eigen::MatrixXd& q, Eigen::Index qcols, Eigen::MatrixXd& w, Rng& rng) {
  const auto& k = simd::active();
  const auto N = static_cast<std::size_t>(w.rows());
  auto project_out_basis = [&](Eigen::Ref<Eigen::VectorXd> col) {
    if (qcols == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coef = q.leftCols(qcols).transpose() * col;
      col.noalias() -= q.leftCols(qcols) * coef;
    }
  };
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (int attempt = 0;; ++attempt) {
      auto col = w.col(c);
      const double before = std::sqrt(k.dot(col.data(), col.data(), N));
      project_out_basis(col);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index t = 0; t < c; ++t) {
          const double h = k.dot(w.col(t).data(), col.data(), N);
          k.axpy(-h, w.col(t).data(), col.data(), N);
        }
      }
      const double after = std::sqrt(k.dot(col.data(), col.data(), N));
      if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
        k.scale(1.0 / after, col.data(), N);
        break;
      }
      if (attempt > 8) throw std::runtime_error("block orthonormalization failed to find a new direction");
      fill_random(col, rng);
    }
  }
}

}  // namespace

IterativeResult spectrum_iterative_full(const ParamVector& pv, int k, double tol, const IterativeOptions& opt) {
  const int n = pv.n();
  if (n > kMaxN) throw CapacityError("iterative spectrum supports n <= " + std::to_string(kMaxN));
  if (k < n) throw ArgumentError("spectrum_iterative needs k >= n");
  const ChainOperator op(pv);
  const auto N = static_cast<Eigen::Index>(op.size());
  if (k > N) throw ArgumentError("k exceeds the number of states");

  IterativeResult result;
  SpectrumReport& rep = result.report;
  rep.n = n;
  rep.method = SpectrumMethod::Iterative;
  rep.cluster_tol = opt.cluster_tol;

  const Eigen::Index b = std::min<Eigen::Index>(k + opt.guard, N);
  Eigen::Index m_max = opt.max_basis > 0 ? opt.max_basis : std::min<Eigen::Index>(8 * b, N);
  if (opt.max_basis == 0 && N > 100000) m_max = std::min<Eigen::Index>(m_max, 3 * b);
  m_max = std::min(m_max, N);

  Rng rng(opt.seed);
  if (m_max < 2 * b) {
    // Too few states for a meaningful Krylov expansion; solve the full projected problem.
    m_max = N;
  }

  Eigen::MatrixXd x(N, b);
  for (Eigen::Index c = 0; c < b; ++c) fill_random(x.col(c), rng);
  orthonormalize_block(x, 0, x, rng);
  Eigen::MatrixXd sx;
  apply_block(op, x, sx);
  rep.matvecs += static_cast<int>(b);

  Eigen::MatrixXd q(N, m_max);
  Eigen::MatrixXd sq(N, m_max);
  Eigen::VectorXd theta;
  std::vector<double> residuals(static_cast<std::size_t>(k));
  bool converged = false;

  for (int restart = 0; restart <= opt.max_restarts && !converged; ++restart) {
    q.leftCols(b) = x;
    sq.leftCols(b) = sx;
    Eigen::Index cols = b;
    while (cols < m_max) {
      const Eigen::Index add = std::min(b, m_max - cols);
      Eigen::MatrixXd w = sq.middleCols(cols - b, add);
      orthonormalize_block(q, cols, w, rng);
      Eigen::MatrixXd sw;
      apply_block(op, w, sw);
      rep.matvecs += static_cast<int>(add);
      q.middleCols(cols, add) = w;
      sq.middleCols(cols, add) = sw;
      cols += add;
    }
    Eigen::MatrixXd h = q.leftCols(cols).transpose() * sq.leftCols(cols);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    // Top-b Ritz pairs, descending.
    const Eigen::MatrixXd y = es.eigenvectors().rightCols(b).rowwise().reverse();
    theta = es.eigenvalues().tail(b).reverse();
    x = q.leftCols(cols) * y;
    sx = sq.leftCols(cols) * y;

    double worst = 0.0;
    for (int c = 0; c < k; ++c) {
      residuals[static_cast<std::size_t>(c)] = (sx.col(c) - theta(c) * x.col(c)).norm();
      worst = std::max(worst, residuals[static_cast<std::size_t>(c)]);
    }
    converged = worst <= tol;
    if (!converged && cols == N) {
      // The basis spans the whole space, so Ritz pairs are exact up to rounding.
      converged = worst <= std::max(tol, 1e-12);
    }
    if (!converged) orthonormalize_block(x, 0, x, rng), apply_block(op, x, sx), rep.matvecs += static_cast<int>(b);
  }

  rep.converged = converged;
  rep.eigenvalues.assign(theta.data(), theta.data() + k);
  finish_report(rep);
  std::size_t pos0 = 0;
  for (auto& cl : rep.clusters) {
    double worst = 0.0;
    for (int t = 0; t < cl.multiplicity; ++t) worst = std::max(worst, residuals[pos0 + static_cast<std::size_t>(t)]);
    cl.residual = worst;
    pos0 += static_cast<std::size_t>(cl.multiplicity);
  }
  result.residuals = residuals;
  const auto sq_mu = op.sqrt_mu();
  for (int c = 0; c < k; ++c) {
    result.pairs.values.push_back(theta(c));
    Vec g(op.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = x(static_cast<Eigen::Index>(i), c) / sq_mu[i];
    result.pairs.vectors.push_back(std::move(g));
  }
  if (!converged) {
    throw ConvergenceError("iterative eigensolver did not reach residual " + std::to_string(tol) + " within " +
                               std::to_string(opt.max_restarts) + " restarts",
                           std::move(result));
  }
  return result;
}

SpectrumReport spectrum_iterative(const ParamVector& pv, int k, double tol, const IterativeOptions& opt) {
  return spectrum_iterative_full(pv, k, tol, opt).report;
}

// ---------------------------------------------------------------------------
// Orbit blocks

namespace {
void check_triple(const ParamVector& pv, int i, int j, int k) {
  if (!(1 <= i && i < j && j < k && k <= pv.n())) {
    throw ArgumentError("orbit triple must satisfy 1 <= i < j < k <= n");
  }
}

template <class T, class P>
std::array<std::array<T, 6>, 6> block_entries(const P& p, int i, int j, int k) {
  const T z = T(0);
  return {{
      {p(i, j) + p(j, k), p(j, i), p(k, j), z, z, z},
      {p(i, j), p(j, i) + p(i, k), z, p(k, i), z, z},
      {p(j, k), z, p(i, k) + p(k, j), z, p(k, i), z},
      {z, p(i, k), z, p(j, k) + p(k, i), z, p(k, j)},
      {z, z, p(i, k), z, p(k, i) + p(i, j), p(j, i)},
      {z, z, z, p(j, k), p(i, j), p(k, j) + p(j, i)},
  }};
}
}  // namespace

OrbitBlock orbit_block(const ParamVector& pv, int i, int j, int k) {
  check_triple(pv, i, j, k);
  OrbitBlock b;
  b.labels = {i, j, k};
  const auto e = block_entries<double>([&](int a, int c) { return pv(a, c); }, i, j, k);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) b.matrix(r, c) = e[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  b.s = s_orbit(pv, i, j, k);
  return b;
}

std::array<double, 6> orbit_block_eigenvalues(const OrbitBlock& block, const ParamVector& pv) {
  const auto [i, j, k] = block.labels;
  // Relative stationary weight of each arrangement (a,b,c): p_{a,b} p_{a,c} p_{b,c}.
  const std::array<std::array<int, 3>, 6> arr{{{i, j, k}, {j, i, k}, {i, k, j}, {j, k, i}, {k, i, j}, {k, j, i}}};
  Eigen::Matrix<double, 6, 1> sw;
  for (int t = 0; t < 6; ++t) {
    const auto& a = arr[static_cast<std::size_t>(t)];
    sw(t) = std::sqrt(pv(a[0], a[1]) * pv(a[0], a[2]) * pv(a[1], a[2]));
  }
  Eigen::Matrix<double, 6, 6> s;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) s(r, c) = sw(r) / sw(c) * block.matrix(r, c);
  s = (0.5 * (s + s.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(s, Eigen::EigenvaluesOnly);
  std::array<double, 6> out{};
  for (int t = 0; t < 6; ++t) out[static_cast<std::size_t>(t)] = es.eigenvalues()(t);
  return out;
}

RationalMatrix6 orbit_block_exact(const ParamVector& pv, int i, int j, int k) {
  check_triple(pv, i, j, k);
  if (!pv.is_exact()) throw ModeError("exact orbit block needs an exact-rational parameter vector");
  return block_entries<mpq_class>([&](int a, int c) { return pv.exact(a, c); }, i, j, k);
}

std::vector<mpq_class> charpoly(const RationalMatrix6& a) {
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k.
  constexpr int n = 6;
  std::vector<mpq_class> c(n + 1);
  c[n] = 1;
  RationalMatrix6 m{};
  for (auto& row : m)
    for (auto& v : row) v = 0;
  for (int step = 1; step <= n; ++step) {
    RationalMatrix6 next{};
    for (int r = 0; r < n; ++r) {
      for (int col = 0; col < n; ++col) {
        mpq_class acc = 0;
        for (int t = 0; t < n; ++t) acc += a[r][t] * m[t][col];
        if (r == col) acc += c[n - step + 1];
        next[r][col] = acc;
      }
    }
    m = next;
    mpq_class tr = 0;
    for (int r = 0; r < n; ++r)
      for (int t = 0; t < n; ++t) tr += a[r][t] * m[t][r];
    c[n - step] = -tr / step;
    c[n - step].canonicalize();
  }
  return c;
}

namespace {
std::vector<mpq_class> poly_mul(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  std::vector<mpq_class> out(a.size() + b.size() - 1);
  for (auto& v : out) v = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  for (auto& v : out) v.canonicalize();
  return out;
}
}  // namespace

CharpolyCheck orbit_charpoly_check(const ParamVector& pv, int i, int j, int k) {
  if (!pv.is_exact()) throw ModeError("charpoly check needs an exact-rational parameter vector");
  CharpolyCheck out;
  out.s = s_orbit_exact(pv, i, j, k);
  out.computed = charpoly(orbit_block_exact(pv, i, j, k));
  const std::vector<mpq_class> alpha{0, 1};
  const std::vector<mpq_class> alpha_minus_2{-2, 1};
  const std::vector<mpq_class> quad{1 - out.s, -2, 1};
  out.expected = poly_mul(poly_mul(alpha, alpha_minus_2), poly_mul(quad, quad));
  out.holds = out.computed == out.expected;
  return out;
}

std::vector<double> tridiag_eigs(double m, int n) {
  if (n < 2) throw ArgumentError("tridiag_eigs needs n >= 2");
  std::vector<double> out;
  for (int k = 1; k <= n - 1; ++k) out.push_back(1.0 - 2.0 * m * std::cos(k * std::numbers::pi / n));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> tridiag_eigs_direct(double m, int n) {
  if (n < 2) throw ArgumentError("tridiag_eigs_direct needs n >= 2");
  const int d = n - 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(d, d);
  for (int r = 0; r + 1 < d; ++r) t(r, r + 1) = t(r + 1, r) = -m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + d};
}

// ---------------------------------------------------------------------------

std::string method_name(SpectrumMethod m) { return m == SpectrumMethod::Dense ? "dense" : "iterative"; }

std::string to_json(const SpectrumReport& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  j["eigenvalues"] = rep.eigenvalues;
  j["gap"] = rep.gap;
  j["lambda_star"] = rep.lambda_star;
  j["multiplicity_at_target"] = rep.multiplicity_at_target;
  j["cluster_tol"] = rep.cluster_tol;
  j["method"] = method_name(rep.method);
  j["converged"] = rep.converged;
  auto& cl = j["clusters"] = nlohmann::json::array();
  for (const auto& c : rep.clusters) {
    nlohmann::json e{{"value", c.value}, {"multiplicity", c.multiplicity}};
    e["residual"] = std::isnan(c.residual) ? nlohmann::json(nullptr) : nlohmann::json(c.residual);
    cl.push_back(std::move(e));
  }
  return j.dump();
}

std::string to_csv(const SpectrumReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) os << i << ',' << rep.eigenvalues[i] << '\n';
  return os.str();
}

}  // namespace fillgap
