#include "rgseq/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rgseq {

namespace {

void check_prop_args(int R, int delta, int M) {
  if (R < 2) throw std::invalid_argument("R must be >= 2");
  const int T = R * (R - 1) / 2;
  if (delta < 0 || delta > T)
    throw std::invalid_argument("delta must lie in 0.." + std::to_string(T));
  if (M < 1 || M > R) throw std::invalid_argument("M must lie in 1.." + std::to_string(R));
}

}  // namespace

BigRat prob_optimal_in_top_m_exact(int R, int delta, int M) {
  check_prop_args(R, delta, M);
  const MahonianTable table(R, delta);
  const BigInt denom = table.at_distance(R, delta);
  if (denom == 0) throw std::invalid_argument("no ranking of R items has the requested distance");
  BigInt numer = 0;
  for (int m = 1; m <= M; ++m) {
    const int d = delta - m + 1;
    if (d < 0) continue;
    numer += table.at_distance(R - 1, d);
  }
  return BigRat(numer, denom);
}

double prob_optimal_in_top_m(int R, int delta, int M) {
  return static_cast<double>(prob_optimal_in_top_m_exact(R, delta, M));
}

BigRat prob_corollary_exact(int R, int delta, int M) {
  check_prop_args(R, delta, M);
  if (delta > R - 1)
    throw std::invalid_argument("closed form requires delta <= R-1, got delta=" +
                                std::to_string(delta));
  const MahonianTable table(R, delta);
  const BigInt denom = table.cumulative(R - 1, delta);
  BigInt numer = 0;
  for (int m = 1; m <= M; ++m) {
    const int d = delta - m + 1;
    if (d < 0) continue;
    // Per-rank count N_{R-1,d} written with cumulative sums. The subtracted
    // term is nonzero only for m = 1 at delta = R-1, where the plain
    // cumulative C_{R-2,d} would overcount by one ranking.
    numer += table.cumulative(R - 2, d) - table.cumulative(R - 2, d - (R - 1));
  }
  return BigRat(numer, denom);
}

double prob_corollary(int R, int delta, int M) {
  return static_cast<double>(prob_corollary_exact(R, delta, M));
}

double tau_from_delta(std::int64_t T, std::int64_t delta) {
  if (T <= 0) throw std::invalid_argument("tau_from_delta: T must be > 0");
  if (delta < 0 || delta > T) throw std::invalid_argument("tau_from_delta: delta must lie in 0..T");
  return static_cast<double>(T - 2 * delta) / static_cast<double>(T);
}

std::int64_t delta_from_tau(std::int64_t T, double tau) {
  if (T <= 0) throw std::invalid_argument("delta_from_tau: T must be > 0");
  if (!(tau >= -1.0 && tau <= 1.0))
    throw std::invalid_argument("delta_from_tau: tau must lie in [-1,1]");
  const double d = static_cast<double>(T) * (1.0 - tau) / 2.0;
  return static_cast<std::int64_t>(std::llround(d));
}

double corollary_tau_threshold(int R) {
  if (R < 2) throw std::invalid_argument("corollary_tau_threshold: R must be >= 2");
  return 1.0 - 4.0 / static_cast<double>(R);
}

}  // namespace rgseq
