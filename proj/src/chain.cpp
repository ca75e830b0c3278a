#include "fillgap/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>

#include "fillgap/errors.hpp"
#include "fillgap/simd/kernels.hpp"

namespace fillgap {

StateSpace::StateSpace(int n) : n_(n), size_(0) {
  if (n < 2 || n > kMaxN) throw CapacityError("state space supports 2 <= n <= " + std::to_string(kMaxN));
  size_ = factorial(n);
  const auto nn = static_cast<std::size_t>(n);
  labels_.resize(size_ * nn);
  neighbor_.assign(nn - 1, std::vector<std::uint32_t>(size_));
  code_.assign(nn - 1, std::vector<std::uint8_t>(size_));

  std::vector<std::uint64_t> weight(nn);
  for (std::size_t i = 0; i < nn; ++i) weight[i] = factorial(n - 1 - static_cast<int>(i));

  std::vector<int> x(nn);
  std::iota(x.begin(), x.end(), 1);
  std::vector<int> digit(nn);
  std::size_t idx = 0;
  do {
    for (std::size_t i = 0; i < nn; ++i) {
      labels_[idx * nn + i] = static_cast<std::uint8_t>(x[i]);
      int c = 0;
      for (std::size_t t = i + 1; t < nn; ++t) c += x[t] < x[i];
      digit[i] = c;
    }
    // Swapping positions r0, r0+1 changes only those two Lehmer digits.
    for (std::size_t r0 = 0; r0 + 1 < nn; ++r0) {
      const int a = x[r0];
      const int b = x[r0 + 1];
      const int d0 = digit[r0 + 1] + (a < b ? 1 : 0);
      const int d1 = digit[r0] - (b < a ? 1 : 0);
      const auto delta = static_cast<std::int64_t>(d0 - digit[r0]) * static_cast<std::int64_t>(weight[r0]) +
                         static_cast<std::int64_t>(d1 - digit[r0 + 1]) * static_cast<std::int64_t>(weight[r0 + 1]);
      neighbor_[r0][idx] = static_cast<std::uint32_t>(static_cast<std::int64_t>(idx) + delta);
      code_[r0][idx] = static_cast<std::uint8_t>((a - 1) * n + (b - 1));
    }
    ++idx;
  } while (std::next_permutation(x.begin(), x.end()));
}

std::shared_ptr<const StateSpace> StateSpace::get(int n) {
  static std::mutex mu;
  static std::map<int, std::weak_ptr<const StateSpace>> cache;
  std::lock_guard lock(mu);
  if (auto sp = cache[n].lock()) return sp;
  auto sp = std::make_shared<const StateSpace>(n);
  cache[n] = sp;
  return sp;
}

int StateSpace::position_of(std::size_t idx, int label) const {
  const auto l = labels(idx);
  return static_cast<int>(std::find(l.begin(), l.end(), static_cast<std::uint8_t>(label)) - l.begin()) + 1;
}

StationaryDist stationary(const ParamVector& pv) {
  const int n = pv.n();
  if (n > kMaxN) throw CapacityError("n over cap");
  const auto states = StateSpace::get(n);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> logp(nn * nn, 0.0);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (a != b) logp[static_cast<std::size_t>(a - 1) * nn + static_cast<std::size_t>(b - 1)] = std::log(pv(a, b));

  StationaryDist out;
  out.mu.resize(states->size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < states->size(); ++idx) {
    const auto x = states->labels(idx);
    double s = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = i + 1; j < nn; ++j) s += logp[static_cast<std::size_t>(x[i] - 1) * nn + (x[j] - 1)];
    out.mu[idx] = s;
    mx = std::max(mx, s);
  }
  double total = 0.0;
  for (auto& v : out.mu) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : out.mu) v /= total;
  out.log_z = mx + std::log(total);
  return out;
}

std::vector<mpq_class> stationary_exact(const ParamVector& pv) {
  if (!pv.is_exact()) throw ModeError("stationary_exact needs an exact-rational parameter vector");
  if (pv.n() > kMaxDenseN) throw CapacityError("stationary_exact supports n <= " + std::to_string(kMaxDenseN));
  const auto states = StateSpace::get(pv.n());
  const auto nn = static_cast<std::size_t>(pv.n());
  std::vector<mpq_class> w(states->size());
  mpq_class total = 0;
  for (std::size_t idx = 0; idx < states->size(); ++idx) {
    const auto x = states->labels(idx);
    mpq_class prod = 1;
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = i + 1; j < nn; ++j) prod *= pv.exact(x[i], x[j]);
    w[idx] = prod;
    total += prod;
  }
  for (auto& v : w) {
    v /= total;
    v.canonicalize();
  }
  return w;
}

ChainOperator::ChainOperator(const ParamVector& pv)
    : pv_(pv), states_(StateSpace::get(pv.n())), stat_(fillgap::stationary(pv)) {
  const int n = pv.n();
  const auto nn = static_cast<std::size_t>(n);
  stay_.assign(nn * nn, 0.0);
  swap_.assign(nn * nn, 0.0);
  sym_off_.assign(nn * nn, 0.0);
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      const std::size_t c = static_cast<std::size_t>(a - 1) * nn + static_cast<std::size_t>(b - 1);
      stay_[c] = pv(a, b);
      swap_[c] = pv(b, a);
      sym_off_[c] = std::sqrt(pv(a, b) * pv(b, a));
    }
  }
  sqrt_mu_.resize(stat_.mu.size());
  std::transform(stat_.mu.begin(), stat_.mu.end(), sqrt_mu_.begin(), [](double m) { return std::sqrt(m); });
}

void ChainOperator::check_r(int r) const {
  if (r < 1 || r > n() - 1) throw RangeError("transposition index r=" + std::to_string(r) + " outside [1, n-1]");
}

void ChainOperator::check_len(std::size_t len) const {
  if (len != size()) {
    throw ArgumentError("vector length " + std::to_string(len) + " does not match n! = " + std::to_string(size()));
  }
}

void ChainOperator::apply_E(int r, std::span<const double> f, std::span<double> out) const {
  check_r(r);
  check_len(f.size());
  check_len(out.size());
  simd::active().transposition(f.data(), out.data(), states_->neighbor(r).data(), states_->pair_code(r).data(),
                               stay_.data(), swap_.data(), 1.0, false, size());
}

void ChainOperator::apply_F(int r, std::span<const double> f, std::span<double> out) const {
  apply_E(r, f, out);
  for (std::size_t x = 0; x < size(); ++x) out[x] = f[x] - out[x];
}

void ChainOperator::apply_K(std::span<const double> f, std::span<double> out) const {
  check_len(f.size());
  check_len(out.size());
  const auto& k = simd::active();
  const double coeff = 1.0 / (n() - 1);
  for (int r = 1; r <= n() - 1; ++r) {
    k.transposition(f.data(), out.data(), states_->neighbor(r).data(), states_->pair_code(r).data(), stay_.data(),
                    swap_.data(), coeff, r > 1, size());
  }
}

void ChainOperator::apply_L(std::span<const double> f, std::span<double> out) const {
  apply_K(f, out);
  for (std::size_t x = 0; x < size(); ++x) out[x] = f[x] - out[x];
}

void ChainOperator::apply_symmetric(std::span<const double> v, std::span<double> out) const {
  check_len(v.size());
  check_len(out.size());
  const auto& k = simd::active();
  const double coeff = 1.0 / (n() - 1);
  for (int r = 1; r <= n() - 1; ++r) {
    k.transposition(v.data(), out.data(), states_->neighbor(r).data(), states_->pair_code(r).data(), stay_.data(),
                    sym_off_.data(), coeff, r > 1, size());
  }
}

Vec ChainOperator::apply_E(int r, std::span<const double> f) const {
  Vec out(size());
  apply_E(r, f, out);
  return out;
}
Vec ChainOperator::apply_F(int r, std::span<const double> f) const {
  Vec out(size());
  apply_F(r, f, out);
  return out;
}
Vec ChainOperator::apply_K(std::span<const double> f) const {
  Vec out(size());
  apply_K(f, out);
  return out;
}
Vec ChainOperator::apply_L(std::span<const double> f) const {
  Vec out(size());
  apply_L(f, out);
  return out;
}

double ChainOperator::inner(std::span<const double> f, std::span<const double> g) const {
  check_len(f.size());
  check_len(g.size());
  return simd::active().weighted_dot(f.data(), g.data(), stat_.mu.data(), size());
}

double ChainOperator::norm(std::span<const double> f) const { return std::sqrt(std::max(0.0, inner(f, f))); }

Eigen::MatrixXd ChainOperator::dense_K() const {
  if (n() > kMaxDenseN) throw CapacityError("dense matrices are limited to n <= " + std::to_string(kMaxDenseN));
  const auto N = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
  const double coeff = 1.0 / (n() - 1);
  for (int r = 1; r <= n() - 1; ++r) {
    const auto nb = states_->neighbor(r);
    const auto code = states_->pair_code(r);
    for (Eigen::Index x = 0; x < N; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      K(x, x) += coeff * stay_[code[ux]];
      K(x, static_cast<Eigen::Index>(nb[ux])) += coeff * swap_[code[ux]];
    }
  }
  return K;
}

Eigen::MatrixXd ChainOperator::dense_symmetric() const {
  if (n() > kMaxDenseN) throw CapacityError("dense matrices are limited to n <= " + std::to_string(kMaxDenseN));
  const auto N = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  const double coeff = 1.0 / (n() - 1);
  for (int r = 1; r <= n() - 1; ++r) {
    const auto nb = states_->neighbor(r);
    const auto code = states_->pair_code(r);
    for (Eigen::Index x = 0; x < N; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      S(x, x) += coeff * stay_[code[ux]];
      S(x, static_cast<Eigen::Index>(nb[ux])) += coeff * sym_off_[code[ux]];
    }
  }
  return S;
}

Vec apply_E(const ParamVector& pv, int r, std::span<const double> f) { return ChainOperator(pv).apply_E(r, f); }
Vec apply_F(const ParamVector& pv, int r, std::span<const double> f) { return ChainOperator(pv).apply_F(r, f); }
Vec apply_K(const ParamVector& pv, std::span<const double> f) { return ChainOperator(pv).apply_K(f); }
Vec apply_L(const ParamVector& pv, std::span<const double> f) { return ChainOperator(pv).apply_L(f); }
double inner(const ParamVector& pv, std::span<const double> f, std::span<const double> g) {
  return ChainOperator(pv).inner(f, g);
}

double commutation_check(const ChainOperator& op, int r, int s, std::span<const double> f) {
  if (std::abs(r - s) <= 1) throw ArgumentError("commutation_check needs |r - s| > 1");
  const Vec rs = op.apply_F(r, op.apply_F(s, f));
  Vec sr = op.apply_F(s, op.apply_F(r, f));
  for (std::size_t x = 0; x < sr.size(); ++x) sr[x] -= rs[x];
  return op.norm(sr);
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  const auto old = os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fillgap
