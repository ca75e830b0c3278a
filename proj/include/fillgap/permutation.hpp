#pragma once

// Elements of S_n in one-line notation, lexicographic (Lehmer code) indexing,
// the adjacent transpositions tau_r and the orbits of <tau_r, tau_{r+1}>.
//
// Labels and positions are 1-based throughout the public interface, matching
// the usual one-line notation (x_1, ..., x_n).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fillgap {

inline constexpr int kMaxN = 10;
inline constexpr int kMaxDenseN = 7;

std::uint64_t factorial(int n);

class Permutation {
 public:
  // Throws ArgumentError unless entries is a bijection on {1..n} with 2 <= n <= kMaxN.
  explicit Permutation(std::vector<int> entries);

  static Permutation identity(int n);

  int size() const { return static_cast<int>(entries_.size()); }
  // Label at a 1-based position.
  int at(int position) const { return entries_[static_cast<std::size_t>(position - 1)]; }
  std::span<const int> entries() const { return entries_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  std::string to_string() const;

 private:
  std::vector<int> entries_;
};

// Lexicographic index in [0, n!).
std::uint64_t rank(const Permutation& p);
// Inverse of rank; RangeError unless idx < n!.
Permutation unrank(std::uint64_t idx, int n);

// x^{tau_r}: swap positions r and r+1, 1 <= r <= n-1.
Permutation apply_tau(const Permutation& x, int r);

// 1-based position of a label.
int pos(const Permutation& x, int label);

// One orbit of G_r = <tau_r, tau_{r+1}>; members are listed in the basis order
// (i,j,k), (j,i,k), (i,k,j), (j,k,i), (k,i,j), (k,j,i) of the three labels
// sitting in positions r, r+1, r+2.
struct OrbitHandle {
  int position = 0;
  std::array<int, 3> labels{};
  std::vector<Permutation> members;  // always 6
  // Labels outside positions r..r+2, in position order.
  std::vector<int> fixed_suffix;

  friend bool operator==(const OrbitHandle&, const OrbitHandle&) = default;
};

OrbitHandle g_orbit(const Permutation& x, int r);
std::vector<OrbitHandle> orbit_partition(int n, int r);

// Permutation <-> JSON array of 1-based labels, e.g. [2,1,3].
std::string to_json(const Permutation& p);
Permutation permutation_from_json(const std::string& text);

}  // namespace fillgap
