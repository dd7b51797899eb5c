#include "rgseq/perm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rgseq {

bool is_permutation_of_1_to_n(const Permutation& x) {
  const int n = static_cast<int>(x.size());
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int v : x) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

void require_permutation(const Permutation& x) {
  const int n = static_cast<int>(x.size());
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int i = 0; i < n; ++i) {
    const int v = x[static_cast<std::size_t>(i)];
    if (v < 1 || v > n)
      throw std::invalid_argument("sequence: entry at position " + std::to_string(i + 1) + " is " +
                                  std::to_string(v) + ", expected a value in 1.." +
                                  std::to_string(n));
    if (seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("sequence: entry " + std::to_string(v) +
                                  " repeated at position " + std::to_string(i + 1));
    seen[static_cast<std::size_t>(v)] = true;
  }
}

std::string sequence_to_string(const Permutation& x) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << '-';
    os << x[i];
  }
  return os.str();
}

Permutation sequence_from_string(const std::string& s) {
  Permutation out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, '-')) {
    if (tok.empty()) throw std::invalid_argument("sequence string: empty component in '" + s + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("sequence string: '" + tok + "' is not an integer");
    }
    if (used != tok.size())
      throw std::invalid_argument("sequence string: '" + tok + "' is not an integer");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("sequence string: no task ids in '" + s + "'");
  require_permutation(out);
  return out;
}

int kendall_distance(const Permutation& a, const Permutation& b) {
  require_permutation(a);
  require_permutation(b);
  if (a.size() != b.size())
    throw std::invalid_argument("kendall_distance: sequences have different lengths");
  const int n = static_cast<int>(a.size());
  // Position of each item in b; a pair is discordant when its relative order
  // differs between the two sequences.
  std::vector<int> pos_b(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) pos_b[static_cast<std::size_t>(b[static_cast<std::size_t>(i)])] = i;
  int d = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int pi = pos_b[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
      const int pj = pos_b[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])];
      if (pi > pj) ++d;
    }
  return d;
}

BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

MahonianTable::MahonianTable(int R, int max_distance) : R_(R), cap_(max_distance) {
  if (R < 1) throw std::invalid_argument("MahonianTable: R must be >= 1");
  c_.resize(static_cast<std::size_t>(R) + 1);
  c_[0] = {BigInt(1)};  // the empty sequence, zero inversions
  for (int r = 1; r <= R; ++r) {
    int tmax = r * (r - 1) / 2;
    if (cap_ >= 0 && cap_ < tmax) tmax = cap_;
    auto& row = c_[static_cast<std::size_t>(r)];
    row.reserve(static_cast<std::size_t>(tmax) + 1);
    // The window sum over l in [d-r+1, d] of cumulative(r-1, l) telescopes:
    // one term enters and one leaves as d advances.
    row.push_back(cumulative(r - 1, 0));
    for (int d = 1; d <= tmax; ++d)
      row.push_back(row.back() + cumulative(r - 1, d) - cumulative(r - 1, d - r));
  }
}

BigInt MahonianTable::cumulative(int r, int d) const {
  if (r < 0 || r > R_) throw std::invalid_argument("MahonianTable::cumulative: r out of range");
  if (d < 0) return 0;
  const auto& row = c_[static_cast<std::size_t>(r)];
  const int stored = static_cast<int>(row.size()) - 1;
  if (d > stored) {
    // Complete rows end at r(r-1)/2, where the value saturates at r!.
    if (stored == r * (r - 1) / 2) d = stored;
    else
      throw std::logic_error("MahonianTable::cumulative: d exceeds the table's distance cap");
  }
  return row[static_cast<std::size_t>(d)];
}

BigInt MahonianTable::at_distance(int r, int d) const {
  return cumulative(r, d) - cumulative(r, d - 1);
}

BigInt cumulative_inversion_count(int R, int delta) {
  return MahonianTable(R, delta).cumulative(R, delta);
}

BigInt permutations_at_distance_count(int R, int delta) {
  return MahonianTable(R, delta).at_distance(R, delta);
}

LexEnumerator::LexEnumerator(int J, int cap) {
  if (J < 1) throw std::invalid_argument("LexEnumerator: J must be >= 1");
  if (J > cap)
    throw std::invalid_argument("LexEnumerator: J=" + std::to_string(J) +
                                " exceeds the enumeration cap of " + std::to_string(cap));
  current_.resize(static_cast<std::size_t>(J));
  for (int i = 0; i < J; ++i) current_[static_cast<std::size_t>(i)] = i + 1;
}

bool LexEnumerator::next(Permutation& out) {
  if (done_) return false;
  if (fresh_) {
    fresh_ = false;
    out = current_;
    return true;
  }
  if (!std::next_permutation(current_.begin(), current_.end())) {
    done_ = true;
    return false;
  }
  out = current_;
  return true;
}

Permutation nth_permutation(int J, std::uint64_t index) {
  if (J < 1 || J > kEnumerationCap)
    throw std::invalid_argument("nth_permutation: J out of range 1.." +
                                std::to_string(kEnumerationCap));
  std::uint64_t fact = 1;
  for (int k = 2; k <= J; ++k) fact *= static_cast<std::uint64_t>(k);
  if (index >= fact) throw std::invalid_argument("nth_permutation: index beyond J!");
  std::vector<int> pool(static_cast<std::size_t>(J));
  for (int i = 0; i < J; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
  Permutation out;
  out.reserve(static_cast<std::size_t>(J));
  for (int k = J; k >= 1; --k) {
    fact /= static_cast<std::uint64_t>(k);
    const std::uint64_t q = index / fact;
    index %= fact;
    out.push_back(pool[static_cast<std::size_t>(q)]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(q));
  }
  return out;
}

Permutation sample_benter(const std::vector<double>& theta, const std::vector<double>& alpha,
                          Rng& rng) {
  const std::size_t J = theta.size();
  if (J == 0) throw std::invalid_argument("sample_benter: empty theta");
  if (alpha.size() != J) throw std::invalid_argument("sample_benter: alpha/theta size mismatch");
  for (double t : theta)
    if (!(t > 0.0)) throw std::invalid_argument("sample_benter: theta must be positive");

  std::vector<double> log_theta(J);
  for (std::size_t i = 0; i < J; ++i) log_theta[i] = std::log(theta[i]);

  std::vector<int> remaining(J);
  for (std::size_t i = 0; i < J; ++i) remaining[i] = static_cast<int>(i) + 1;

  Permutation out;
  out.reserve(J);
  std::vector<double> w;
  for (std::size_t stage = 0; stage < J; ++stage) {
    const std::size_t n = remaining.size();
    if (n == 1) {
      out.push_back(remaining[0]);
      break;
    }
    const double a = alpha[stage];
    // Normalize through the max exponent so theta^alpha never overflows.
    w.assign(n, 0.0);
    double mx = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = a * log_theta[static_cast<std::size_t>(remaining[i] - 1)];
      mx = std::max(mx, w[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::exp(w[i] - mx);
      total += w[i];
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += w[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

}  // namespace rgseq
