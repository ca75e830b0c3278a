#include "fillgap/permutation.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "fillgap/errors.hpp"

namespace fillgap {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

Permutation::Permutation(std::vector<int> entries) : entries_(std::move(entries)) {
  const int n = size();
  if (n < 2 || n > kMaxN) {
    throw ArgumentError("permutation length must lie in [2, " + std::to_string(kMaxN) +
                        "], got " + std::to_string(n));
  }
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int v : entries_) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)]) {
      throw ArgumentError("entries are not a bijection on {1.." + std::to_string(n) + "}");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> e(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(e.begin(), e.end(), 1);
  return Permutation(std::move(e));
}

std::string Permutation::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(entries_[i]);
  }
  return s + ")";
}

std::uint64_t rank(const Permutation& p) {
  const int n = p.size();
  std::uint64_t idx = 0;
  auto e = p.entries();
  for (int i = 0; i < n; ++i) {
    int smaller_after = 0;
    for (int t = i + 1; t < n; ++t) smaller_after += e[static_cast<std::size_t>(t)] < e[static_cast<std::size_t>(i)];
    idx += static_cast<std::uint64_t>(smaller_after) * factorial(n - 1 - i);
  }
  return idx;
}

Permutation unrank(std::uint64_t idx, int n) {
  if (n < 2 || n > kMaxN) throw RangeError("n out of range: " + std::to_string(n));
  if (idx >= factorial(n)) {
    throw RangeError("rank " + std::to_string(idx) + " out of range for n=" + std::to_string(n));
  }
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 1);
  std::vector<int> out;
  out.reserve(pool.size());
  for (int i = 0; i < n; ++i) {
    const std::uint64_t w = factorial(n - 1 - i);
    const auto digit = static_cast<std::size_t>(idx / w);
    idx %= w;
    out.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return Permutation(std::move(out));
}

Permutation apply_tau(const Permutation& x, int r) {
  if (r < 1 || r > x.size() - 1) {
    throw RangeError("tau index r=" + std::to_string(r) + " outside [1, n-1]");
  }
  std::vector<int> e(x.entries().begin(), x.entries().end());
  std::swap(e[static_cast<std::size_t>(r - 1)], e[static_cast<std::size_t>(r)]);
  return Permutation(std::move(e));
}

int pos(const Permutation& x, int label) {
  if (label < 1 || label > x.size()) throw RangeError("label out of range: " + std::to_string(label));
  auto e = x.entries();
  return static_cast<int>(std::find(e.begin(), e.end(), label) - e.begin()) + 1;
}

OrbitHandle g_orbit(const Permutation& x, int r) {
  const int n = x.size();
  if (r < 1 || r > n - 2) throw RangeError("orbit position r=" + std::to_string(r) + " outside [1, n-2]");

  std::array<int, 3> lab{x.at(r), x.at(r + 1), x.at(r + 2)};
  std::sort(lab.begin(), lab.end());
  const auto [i, j, k] = lab;

  OrbitHandle h{.position = r, .labels = lab, .members = {}, .fixed_suffix = {}};
  for (int p = 1; p <= n; ++p) {
    if (p < r || p > r + 2) h.fixed_suffix.push_back(x.at(p));
  }

  const std::array<std::array<int, 3>, 6> arrangements{{
      {i, j, k}, {j, i, k}, {i, k, j}, {j, k, i}, {k, i, j}, {k, j, i}}};
  std::vector<int> base(x.entries().begin(), x.entries().end());
  h.members.reserve(6);
  for (const auto& a : arrangements) {
    for (int t = 0; t < 3; ++t) base[static_cast<std::size_t>(r - 1 + t)] = a[static_cast<std::size_t>(t)];
    h.members.emplace_back(base);
  }
  return h;
}

std::vector<OrbitHandle> orbit_partition(int n, int r) {
  if (n < 3 || n > kMaxN) throw RangeError("orbit_partition needs 3 <= n <= " + std::to_string(kMaxN));
  if (r < 1 || r > n - 2) throw RangeError("orbit position r=" + std::to_string(r) + " outside [1, n-2]");
  std::vector<OrbitHandle> out;
  out.reserve(factorial(n) / 6);
  // Canonical representatives are exactly the permutations increasing on positions r..r+2.
  std::vector<int> e(static_cast<std::size_t>(n));
  std::iota(e.begin(), e.end(), 1);
  do {
    const auto a = static_cast<std::size_t>(r - 1);
    if (e[a] < e[a + 1] && e[a + 1] < e[a + 2]) out.push_back(g_orbit(Permutation(e), r));
  } while (std::next_permutation(e.begin(), e.end()));
  return out;
}

std::string to_json(const Permutation& p) {
  return nlohmann::json(std::vector<int>(p.entries().begin(), p.entries().end())).dump();
}

Permutation permutation_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid permutation JSON: ") + e.what());
  }
  if (!j.is_array()) throw ArgumentError("permutation JSON must be an array of labels");
  std::vector<int> e;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ArgumentError("permutation labels must be integers");
    e.push_back(v.get<int>());
  }
  return Permutation(std::move(e));
}

}  // namespace fillgap
