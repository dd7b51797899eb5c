#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "rgseq/perm.hpp"

namespace rgseq {

using BigRat = boost::multiprecision::cpp_rational;

/// Probability that the true-best item appears in the first M positions of a
/// ranking drawn uniformly from those at Kendall distance exactly `delta`
/// from the true ranking of R items:
///   sum_{m=1}^{M} N_{R-1, delta-m+1} / N_{R, delta}.
/// Exact rational; the plain-double overload converts at the boundary.
BigRat prob_optimal_in_top_m_exact(int R, int delta, int M);
double prob_optimal_in_top_m(int R, int delta, int M);

/// Same probability via the closed form valid for delta <= R-1:
///   sum_{m=1}^{M} C_{R-2, delta-m+1} / C_{R-1, delta}.
BigRat prob_corollary_exact(int R, int delta, int M);
double prob_corollary(int R, int delta, int M);

/// Kendall tau <-> Kendall distance over T = R(R-1)/2 item pairs:
/// tau = (T - 2*delta)/T; the inverse rounds T(1-tau)/2 to the nearest
/// integer. Throws std::invalid_argument outside [0,T] resp. [-1,1].
double tau_from_delta(std::int64_t T, std::int64_t delta);
std::int64_t delta_from_tau(std::int64_t T, double tau);

/// Minimum rank correlation for which the closed form above applies:
/// tau >= 1 - 2(R-1)/T = 1 - 4/R.
double corollary_tau_threshold(int R);

}  // namespace rgseq
