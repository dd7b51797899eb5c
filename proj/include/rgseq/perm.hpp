#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rgseq/rng.hpp"

namespace rgseq {

using BigInt = boost::multiprecision::cpp_int;

/// A task sequence: the integers 1..J, each exactly once, in execution order.
using Permutation = std::vector<int>;

/// Largest J for which full enumeration of J! sequences is permitted.
inline constexpr int kEnumerationCap = 10;

bool is_permutation_of_1_to_n(const Permutation& x);

/// Throws std::invalid_argument (naming the offending position) if `x` is not
/// a permutation of 1..x.size().
void require_permutation(const Permutation& x);

/// "8-6-4-3-1" style rendering, and its inverse.
std::string sequence_to_string(const Permutation& x);
Permutation sequence_from_string(const std::string& s);

/// Kendall distance: number of discordant pairs between two sequences over
/// the same items. Throws if the two are not permutations of the same 1..J.
int kendall_distance(const Permutation& a, const Permutation& b);

BigInt factorial(int n);

/// Inversion-count combinatorics for sequences of R items.
///
/// cumulative(r, d) counts permutations of r items with at most d inversions;
/// at_distance(r, d) counts those with exactly d. Values grow past 64 bits
/// quickly, hence arbitrary precision. Built bottom-up via
///   cumulative(r, d) = sum over l in [d-r+1, d] of cumulative(r-1, l).
class MahonianTable {
 public:
  /// Builds rows for all r <= R. With max_distance >= 0, each row is only
  /// computed up to that distance (queries must then stay at d <= max_distance
  /// unless the row is complete anyway); the default builds complete rows.
  /// Capping matters at large R: complete rows hold r(r-1)/2 + 1 entries each.
  explicit MahonianTable(int R, int max_distance = -1);

  int R() const { return R_; }
  /// Maximum possible inversion count, R(R-1)/2.
  int max_inversions() const { return R_ * (R_ - 1) / 2; }

  /// C_{r,d} for 0 <= r <= R; d < 0 yields 0, d beyond r(r-1)/2 yields r!.
  /// Throws std::logic_error when d lands in a region a capped table skipped.
  BigInt cumulative(int r, int d) const;

  /// N_{r,d} = C_{r,d} - C_{r,d-1}; zero outside [0, r(r-1)/2].
  BigInt at_distance(int r, int d) const;

 private:
  int R_;
  int cap_;                             // -1: complete rows
  std::vector<std::vector<BigInt>> c_;  // c_[r][d], d <= min(r(r-1)/2, cap)
};

/// One-shot convenience wrappers over MahonianTable.
BigInt cumulative_inversion_count(int R, int delta);
BigInt permutations_at_distance_count(int R, int delta);

/// Streams the J! permutations of 1..J in lexicographic order.
/// Throws std::invalid_argument when J exceeds `cap`.
class LexEnumerator {
 public:
  explicit LexEnumerator(int J, int cap = kEnumerationCap);

  /// Writes the next sequence into `out`; false once exhausted.
  bool next(Permutation& out);

 private:
  Permutation current_;
  bool fresh_ = true;
  bool done_ = false;
};

/// The `index`-th (0-based) permutation of 1..J in lexicographic order.
/// Requires J <= kEnumerationCap so indices fit comfortably in 64 bits.
Permutation nth_permutation(int J, std::uint64_t index);

/// Draws a sequence from a Benter ranking model: at stage j (0-based) the
/// next item is chosen among those remaining with probability proportional to
/// theta^alpha[j]. theta must be positive; alpha.size() == theta.size(),
/// alpha.back() == 0 (the final stage is forced). Deterministic given `rng`.
Permutation sample_benter(const std::vector<double>& theta, const std::vector<double>& alpha,
                          Rng& rng);

}  // namespace rgseq
